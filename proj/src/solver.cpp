#include "hadinv/solver.hpp"

#include <cmath>

#include "hadinv/linalg.hpp"

namespace hadinv {

namespace {

VecX seed_point(const SmoothMap& map, const InversionOptions& opts) {
  if (!opts.x0) return VecX::Zero(map.dim());
  if (opts.x0->size() != map.dim())
    throw DimensionMismatch("invert: x0 has length " + std::to_string(opts.x0->size()) +
                            ", map has dimension " + std::to_string(map.dim()));
  if (!opts.x0->allFinite()) throw std::invalid_argument("invert: non-finite x0");
  return *opts.x0;
}

void validate_target(const SmoothMap& map, const VecX& y) {
  if (y.size() != map.dim())
    throw DimensionMismatch("invert: target has length " + std::to_string(y.size()) +
                            ", map has dimension " + std::to_string(map.dim()));
  if (!y.allFinite()) throw std::invalid_argument("invert: non-finite target");
}

double point_segment_distance(const VecX& q, const VecX& a, const VecX& b) {
  const VecX ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (q - a).norm();
  const double s = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
  return (q - a + s * (a - b)).norm();
}

double max_segment_deviation(const SmoothMap& map, const GeodesicTrace& trace, const VecX& fa,
                             const VecX& fb) {
  double dev = 0.0;
  for (const GeodesicState& s : trace.states)
    dev = std::max(dev, point_segment_distance(map.value(s.position), fa, fb));
  return dev;
}

FailureInfo from_ode_failure(const OdeFailure& f, int n) {
  FailureInfo info;
  info.kind = f.kind;
  info.t = f.t;
  info.position = f.state.size() >= n ? VecX(f.state.head(n)) : f.state;
  info.detail = f.detail;
  return info;
}

/// Shared tail: polish the pre-polish endpoint and assemble the report.
InversionReport finish_report(const SmoothMap& map, const VecX& y, const InversionOptions& opts,
                              InversionReport report) {
  const VecX endpoint = report.trace.back().position;
  try {
    auto [polished, iters] =
        newton_polish(map, y, endpoint, opts.polish_tol, opts.max_polish_iters);
    report.solution = polished;
    report.polish_iters = iters;
    report.residual = (map.value(polished) - y).norm();
  } catch (const ToleranceNotMet&) {
    report.solution = endpoint;
    report.residual = (map.value(endpoint) - y).norm();
    report.failure = FailureInfo{FailureKind::ToleranceNotMet, 1.0, endpoint,
                                 "Newton polish stalled at residual " +
                                     format_double(report.residual)};
  } catch (const SingularJacobian& e) {
    report.solution = endpoint;
    report.residual = (map.value(endpoint) - y).norm();
    report.failure =
        FailureInfo{FailureKind::SingularJacobian, 1.0, endpoint, e.what()};
  }
  return report;
}

InversionReport failed_report(const SmoothMap& map, const VecX& y, std::string method,
                              GeodesicTrace trace, FailureInfo info) {
  InversionReport report;
  report.method_used = std::move(method);
  report.ode_steps = trace.ode_steps;
  report.trace = std::move(trace);
  report.solution = info.position.size() ? info.position : report.trace.back().position;
  report.residual = (map.value(report.solution) - y).norm();
  report.failure = std::move(info);
  return report;
}

}  // namespace

std::string method_name(InversionMethod m) {
  switch (m) {
    case InversionMethod::Geodesic: return "geodesic";
    case InversionMethod::Continuation: return "continuation";
    case InversionMethod::Auto: return "auto";
  }
  return "?";
}

InversionReport invert_continuation(const SmoothMap& map, const VecX& y,
                                    const InversionOptions& opts) {
  validate_target(map, y);
  const int n = map.dim();
  const VecX x0 = seed_point(map, opts);
  const VecX fx0 = map.value(x0);
  const VecX d = y - fx0;

  // Velocity of the path at a point: Df^{-1} (y - f(x0)). Velocity past the
  // divergence radius counts as path divergence; a log-escaping position
  // never reaches the bound itself.
  auto path_velocity = [&](const VecX& pos) {
    VecX vel = solve_linear(map.jacobian(pos), d);
    if (vel.norm() > opts.state_bound)
      throw PathDiverged("path velocity |Df^{-1} d| exceeded state_bound " +
                         format_double(opts.state_bound));
    return vel;
  };

  GeodesicTrace trace;
  std::optional<OdeFailure> failure;
  if (d.norm() == 0.0) {
    trace.t = {0.0, 1.0};
    trace.states = {GeodesicState{x0, VecX::Zero(n)}, GeodesicState{x0, VecX::Zero(n)}};
  } else {
    OdeProblem prob;
    prob.t0 = 0.0;
    prob.t1 = 1.0;
    prob.y0 = x0;
    prob.rtol = opts.rtol;
    prob.atol = opts.atol;
    prob.max_steps = opts.max_steps;
    prob.state_bound = opts.state_bound;
    prob.rhs = [&](double, const VecX& pos) { return path_velocity(pos); };

    OdeOutcome ode = integrate_adaptive_ex(prob);
    trace.t = std::move(ode.trace.t);
    trace.ode_steps = ode.trace.accepted;
    trace.states.reserve(ode.trace.y.size());
    for (const VecX& pos : ode.trace.y) {
      VecX vel;
      try {
        vel = path_velocity(pos);
      } catch (const NumericError&) {
        vel = VecX::Zero(n);  // velocity undefined at/past the failure point
      }
      trace.states.push_back(GeodesicState{pos, std::move(vel)});
    }
    failure = std::move(ode.failure);
  }

  if (failure)
    return failed_report(map, y, "continuation", std::move(trace), from_ode_failure(*failure, n));

  InversionReport report;
  report.method_used = "continuation";
  report.ode_steps = trace.ode_steps;
  report.straightness_deviation = max_segment_deviation(map, trace, fx0, y);
  report.trace = std::move(trace);
  return finish_report(map, y, opts, std::move(report));
}

InversionReport invert_geodesic(const SmoothMap& map, const VecX& y,
                                const InversionOptions& opts) {
  validate_target(map, y);
  const int n = map.dim();
  const VecX x0 = seed_point(map, opts);
  const VecX fx0 = map.value(x0);
  VecX u;
  try {
    u = solve_linear(map.jacobian(x0), y - fx0);
  } catch (const SingularJacobian& e) {
    GeodesicTrace trace;
    trace.t = {0.0};
    trace.states = {GeodesicState{x0, VecX::Zero(n)}};
    return failed_report(map, y, "geodesic", std::move(trace),
                         FailureInfo{FailureKind::SingularJacobian, 0.0, x0, e.what()});
  }

  GeodesicControls controls{opts.rtol, opts.atol, opts.max_steps, opts.state_bound};
  GeodesicOutcome outcome = exp_map_ex(map, x0, u, 1.0, controls);

  if (outcome.failure)
    return failed_report(map, y, "geodesic", std::move(outcome.trace),
                         from_ode_failure(*outcome.failure, n));

  InversionReport report;
  report.method_used = "geodesic";
  report.ode_steps = outcome.trace.ode_steps;
  report.straightness_deviation = max_segment_deviation(map, outcome.trace, fx0, y);
  report.trace = std::move(outcome.trace);
  return finish_report(map, y, opts, std::move(report));
}

InversionReport invert(const SmoothMap& map, const VecX& y, const InversionOptions& opts) {
  switch (opts.method) {
    case InversionMethod::Continuation:
      return invert_continuation(map, y, opts);
    case InversionMethod::Geodesic:
      return invert_geodesic(map, y, opts);
    case InversionMethod::Auto:
      break;
  }
  InversionReport report = invert_continuation(map, y, opts);
  if (report.failure && report.failure->kind == FailureKind::ToleranceNotMet)
    return invert_geodesic(map, y, opts);
  return report;
}

std::pair<VecX, int> newton_polish(const SmoothMap& map, const VecX& y, const VecX& x_init,
                                   double tol, int max_iters,
                                   std::vector<double>* residual_history) {
  validate_target(map, y);
  if (!(tol > 0.0)) throw std::invalid_argument("newton_polish: tol must be positive");

  VecX x = x_init;
  VecX r = map.value(x) - y;
  double rnorm = r.norm();
  if (residual_history) residual_history->push_back(rnorm);

  for (int iter = 0; iter < max_iters; ++iter) {
    if (rnorm <= tol) return {x, iter};
    const VecX step = solve_linear(map.jacobian(x), -r);

    double lambda = 1.0;
    bool improved = false;
    for (int halving = 0; halving <= 30; ++halving) {
      const VecX x_try = x + lambda * step;
      const VecX r_try = map.value(x_try) - y;
      const double rnorm_try = r_try.norm();
      if (rnorm_try < rnorm) {
        x = x_try;
        r = r_try;
        rnorm = rnorm_try;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (residual_history) residual_history->push_back(rnorm);
    if (!improved)
      throw ToleranceNotMet("newton_polish: no residual decrease after 30 halvings (residual " +
                            format_double(rnorm) + ")");
  }
  if (rnorm <= tol) return {x, max_iters};
  throw ToleranceNotMet("newton_polish: residual " + format_double(rnorm) +
                        " above tolerance " + format_double(tol) + " after " +
                        std::to_string(max_iters) + " iterations");
}

}  // namespace hadinv
