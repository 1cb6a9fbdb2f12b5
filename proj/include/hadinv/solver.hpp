#pragma once

#include <array>
#include <cstdint>

#include "hadinv/geometry.hpp"

namespace hadinv {

enum class InversionMethod { Geodesic, Continuation, Auto };

std::string method_name(InversionMethod m);

struct InversionOptions {
  InversionMethod method = InversionMethod::Auto;
  double rtol = 1e-10;
  double atol = 1e-12;
  double polish_tol = 1e-10;
  int max_polish_iters = 20;
  double state_bound = 1e8;
  int max_steps = 100000;
  std::optional<VecX> x0;  // seed point; origin when unset
};

struct FailureInfo {
  FailureKind kind;
  double t = 0.0;  // path parameter at failure
  VecX position;
  std::string detail;
};

struct InversionReport {
  VecX solution;
  double residual = 0.0;  // |f(solution) - y|
  std::string method_used;
  int ode_steps = 0;
  int polish_iters = 0;
  GeodesicTrace trace;
  double straightness_deviation = 0.0;  // max distance of f(path) from the segment [f(x0), y]
  std::optional<FailureInfo> failure;

  bool ok() const { return !failure.has_value(); }
};

/// First-order continuation: since the image of the inversion path is the
/// straight segment from f(x0) to y, the path solves
///   gamma'(t) = Df(gamma(t))^{-1} (y - f(x0)),  t in [0, 1],
/// followed by a Newton polish of gamma(1). Needs only first derivatives per
/// step. Divergence to infinity is the expected signature of a target outside
/// the image.
InversionReport invert_continuation(const SmoothMap& map, const VecX& y,
                                    const InversionOptions& opts = {});

/// Geodesic shooting: u = Df(x0)^{-1}(y - f(x0)), integrate the pullback
/// geodesic from (x0, u) to t = 1 and polish. Exercises the full second-order
/// machinery; the two routes follow the same path and agree up to ODE error.
InversionReport invert_geodesic(const SmoothMap& map, const VecX& y,
                                const InversionOptions& opts = {});

/// Facade: Auto runs continuation and falls back to geodesic shooting when
/// the polish cannot reach tolerance.
InversionReport invert(const SmoothMap& map, const VecX& y, const InversionOptions& opts = {});

/// Damped Newton (step halving on residual increase, at most 30 halvings per
/// iteration) until |f(x) - y| <= tol. Returns the solution and the iteration
/// count; optionally records the residual after each iteration. Throws
/// ToleranceNotMet or SingularJacobian.
std::pair<VecX, int> newton_polish(const SmoothMap& map, const VecX& y, const VecX& x_init,
                                   double tol, int max_iters,
                                   std::vector<double>* residual_history = nullptr);

// ---------------------------------------------------------------------------
// Hypothesis estimation

struct Interval {
  double lo;
  double hi;
};
using Box = std::vector<Interval>;

/// Sampled lower bound on sigma_min(Df)^2 over a box: c_hat is the smallest
/// sampled value, argmin its location. A sampling heuristic over the given
/// box; no numerical procedure can certify an infimum over all of R^n.
struct HadamardEstimate {
  double c_hat = 0.0;
  VecX argmin;
  Box box;
  std::int64_t samples = 0;
  bool refined = false;
};

/// Regular grid (n_grid points per axis, endpoints included, row-major with
/// the last axis fastest) plus n_random seeded uniform draws; ties keep the
/// earliest sample. With refine, coordinate descent from the best sample
/// (golden-section per axis within one grid cell, keep-best) sharpens the
/// minimum. c_hat always equals sigma_min(Df(argmin))^2 re-evaluated at the
/// returned argmin.
HadamardEstimate estimate_hadamard(const SmoothMap& map, const Box& box, int n_grid,
                                   int n_random, bool refine, std::uint64_t rng_seed);

struct LipschitzViolation {
  VecX x;
  VecX y;
  double image_distance;  // |f(x) - f(y)|
  double bound;           // sqrt(c_hat) |x - y|
};

struct LipschitzProbeReport {
  std::int64_t pairs_checked = 0;
  std::vector<LipschitzViolation> violations;
};

/// Samples point pairs in the box and reports every pair with
/// |f(x) - f(y)| < sqrt(c_hat) |x - y| (1 - 1e-9). Under the boundedness
/// hypothesis with a valid c_hat there are none; violations witness failure
/// of injectivity or of the hypothesis. extra_pairs are checked first.
LipschitzProbeReport lipschitz_probe(const SmoothMap& map, double c_hat, int n_pairs,
                                     const Box& box, std::uint64_t rng_seed,
                                     const std::vector<std::pair<VecX, VecX>>& extra_pairs = {});

}  // namespace hadinv
