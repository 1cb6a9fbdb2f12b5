#pragma once

#include <functional>

#include "hadinv/common.hpp"

namespace hadinv {

struct OdeProblem {
  std::function<VecX(double, const VecX&)> rhs;
  double t0 = 0.0;
  double t1 = 1.0;
  VecX y0;
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_steps = 100000;
  double state_bound = 1e8;  // |y| beyond this is treated as divergence
};

/// Accepted steps, including the initial and final point.
struct OdeTrace {
  std::vector<double> t;
  std::vector<VecX> y;
  int accepted = 0;
  int rejected = 0;

  std::size_t size() const { return t.size(); }
};

struct OdeFailure {
  FailureKind kind;
  double t;
  VecX state;
  std::string detail;
};

/// Non-throwing integration core: on failure the partial trace survives
/// alongside the failure record. rhs exceptions other than SingularJacobian
/// propagate unchanged.
struct OdeOutcome {
  OdeTrace trace;
  std::optional<OdeFailure> failure;
};

OdeOutcome integrate_adaptive_ex(const OdeProblem& p);

/// Dormand-Prince 5(4) with PI step control. Throws PathDiverged,
/// MaxStepsExceeded, or whatever the rhs throws.
OdeTrace integrate_adaptive(const OdeProblem& p);

}  // namespace hadinv
