#pragma once

#include <iosfwd>

#include "hadinv/ode.hpp"
#include "hadinv/smooth_map.hpp"

namespace hadinv {

/// Jacobians with smallest singular value below this are treated as singular
/// by the geometric operations: connection coefficients computed past this
/// point would be garbage, so the failure is made loud instead.
inline constexpr double kSigmaMinFloor = 1e-8;

/// Pullback metric G(x) = J(x)^T J(x) of a map at a base point. For the
/// identity map this is the Euclidean metric.
struct MetricTensor {
  MatX g;
  VecX base_point;
};

/// Connection coefficients gamma[k](i,j) at a base point; symmetric in (i,j),
/// identically zero for affine maps.
struct ChristoffelTensor {
  Tensor3 gamma;
};

struct GeodesicState {
  VecX position;
  VecX velocity;
};

struct GeodesicTrace {
  std::vector<double> t;
  std::vector<GeodesicState> states;
  int ode_steps = 0;  // accepted integrator steps

  std::size_t size() const { return t.size(); }
  const GeodesicState& back() const { return states.back(); }
};

MetricTensor metric_tensor(const SmoothMap& map, const VecX& x);

/// Coefficients from the metric-derivative formula
///   gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij),
/// with the metric derivatives assembled from the analytic second-derivative
/// tensor. Kept as an independent cross-check of christoffel_pushforward.
ChristoffelTensor christoffel_metric(const SmoothMap& map, const VecX& x);

/// Coefficients from the image-straightness identity: since f composed with a
/// geodesic has vanishing second derivative, gamma^k_ij = (J^{-1} H(:,i,j))_k,
/// one linear solve per (i,j) pair.
ChristoffelTensor christoffel_pushforward(const SmoothMap& map, const VecX& x);

/// Right-hand side of the geodesic equation: returns (velocity, acceleration)
/// with acceleration_k = -gamma^k_ij v_i v_j, evaluated by the pushforward
/// route without materializing the full tensor.
GeodesicState geodesic_rhs(const SmoothMap& map, const GeodesicState& s);

struct GeodesicControls {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_steps = 100000;
  double state_bound = 1e8;
};

/// Integrates the geodesic with gamma(0) = p, gamma'(0) = u over [0, t_end]
/// and returns the accepted-step trace; the final position approximates
/// exp_p(t_end * u). A zero initial velocity yields the constant trace
/// without integration. Throws PathDiverged, MaxStepsExceeded, or
/// SingularJacobian annotated with the first failing t.
GeodesicTrace exp_map(const SmoothMap& map, const VecX& p, const VecX& u, double t_end,
                      const GeodesicControls& controls = {});

/// Non-throwing variant keeping the partial trace on failure.
struct GeodesicOutcome {
  GeodesicTrace trace;
  std::optional<OdeFailure> failure;
};
GeodesicOutcome exp_map_ex(const SmoothMap& map, const VecX& p, const VecX& u, double t_end,
                           const GeodesicControls& controls = {});

/// Metric speed sqrt(g(v, v)) = |J(position) velocity|; constant along exact
/// geodesics of the pullback metric.
double speed(const SmoothMap& map, const GeodesicState& s);

/// CSV columns: t, pos_1..pos_n, vel_1..vel_n, speed, image_1..image_n.
void write_trace_csv(std::ostream& out, const SmoothMap& map, const GeodesicTrace& trace);

}  // namespace hadinv
