#include "hadinv/geometry.hpp"

#include <cmath>
#include <ostream>

#include "hadinv/linalg.hpp"

namespace hadinv {

namespace {

/// Jacobian gated on the singularity floor.
MatX checked_jacobian(const SmoothMap& map, const VecX& x) {
  MatX j = map.jacobian(x);
  const double smin = sigma_min(j);
  if (!(smin >= kSigmaMinFloor))
    throw SingularJacobian("Jacobian singular to working precision (sigma_min = " +
                           format_double(smin) + ")");
  return j;
}

}  // namespace

MetricTensor metric_tensor(const SmoothMap& map, const VecX& x) {
  const MatX j = map.jacobian(x);
  return MetricTensor{j.transpose() * j, x};
}

ChristoffelTensor christoffel_metric(const SmoothMap& map, const VecX& x) {
  const int n = map.dim();
  const MatX j = checked_jacobian(map, x);
  const Tensor3 h = map.second_derivative(x);
  const MatX g = j.transpose() * j;

  // dg[m](i,l) = d_m g_il = sum_a H[a](m,i) J(a,l) + J(a,i) H[a](m,l)
  Tensor3 dg(n, MatX::Zero(n, n));
  for (int m = 0; m < n; ++m)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          acc += h[a](m, i) * j(a, l) + j(a, i) * h[a](m, l);
        dg[m](i, l) = acc;
      }

  Eigen::PartialPivLU<MatX> lu = detail::checked_lu(g);
  ChristoffelTensor out{Tensor3(n, MatX::Zero(n, n))};
  VecX rhs(n);
  for (int i = 0; i < n; ++i)
    for (int jj = i; jj < n; ++jj) {
      for (int l = 0; l < n; ++l)
        rhs[l] = 0.5 * (dg[i](jj, l) + dg[jj](i, l) - dg[l](i, jj));
      const VecX gam = lu.solve(rhs);
      for (int k = 0; k < n; ++k) {
        out.gamma[k](i, jj) = gam[k];
        out.gamma[k](jj, i) = gam[k];
      }
    }
  return out;
}

ChristoffelTensor christoffel_pushforward(const SmoothMap& map, const VecX& x) {
  const int n = map.dim();
  const MatX j = checked_jacobian(map, x);
  const Tensor3 h = map.second_derivative(x);

  Eigen::PartialPivLU<MatX> lu = detail::checked_lu(j);
  ChristoffelTensor out{Tensor3(n, MatX::Zero(n, n))};
  VecX rhs(n);
  for (int i = 0; i < n; ++i)
    for (int jj = i; jj < n; ++jj) {
      for (int a = 0; a < n; ++a) rhs[a] = h[a](i, jj);
      const VecX gam = lu.solve(rhs);
      for (int k = 0; k < n; ++k) {
        out.gamma[k](i, jj) = gam[k];
        out.gamma[k](jj, i) = gam[k];
      }
    }
  return out;
}

GeodesicState geodesic_rhs(const SmoothMap& map, const GeodesicState& s) {
  const int n = map.dim();
  const MatX j = checked_jacobian(map, s.position);
  const Tensor3 h = map.second_derivative(s.position);

  VecX w(n);
  for (int a = 0; a < n; ++a) w[a] = s.velocity.dot(h[a] * s.velocity);
  const VecX acceleration = -detail::checked_lu(j).solve(w);
  return GeodesicState{s.velocity, acceleration};
}

GeodesicOutcome exp_map_ex(const SmoothMap& map, const VecX& p, const VecX& u, double t_end,
                           const GeodesicControls& controls) {
  const int n = map.dim();
  if (p.size() != n || u.size() != n)
    throw DimensionMismatch("exp_map: point/velocity dimension mismatch");
  if (!p.allFinite() || !u.allFinite())
    throw std::invalid_argument("exp_map: non-finite input");
  if (!(t_end >= 0.0)) throw std::invalid_argument("exp_map: t_end must be >= 0");

  GeodesicOutcome out;
  if (u.norm() == 0.0 || t_end == 0.0) {
    // exp_p(0) = p exactly
    out.trace.t = {0.0, t_end};
    out.trace.states = {GeodesicState{p, u}, GeodesicState{p, u}};
    return out;
  }

  OdeProblem prob;
  prob.t0 = 0.0;
  prob.t1 = t_end;
  prob.rtol = controls.rtol;
  prob.atol = controls.atol;
  prob.max_steps = controls.max_steps;
  prob.state_bound = controls.state_bound;
  prob.y0 = VecX(2 * n);
  prob.y0 << p, u;
  prob.rhs = [&map, n](double, const VecX& y) {
    const GeodesicState d =
        geodesic_rhs(map, GeodesicState{y.head(n), y.tail(n)});
    VecX dy(2 * n);
    dy << d.position, d.velocity;
    return dy;
  };

  OdeOutcome ode = integrate_adaptive_ex(prob);
  out.trace.t = std::move(ode.trace.t);
  out.trace.ode_steps = ode.trace.accepted;
  out.trace.states.reserve(ode.trace.y.size());
  for (const VecX& y : ode.trace.y)
    out.trace.states.push_back(GeodesicState{y.head(n), y.tail(n)});
  if (ode.failure) {
    ode.failure->state = ode.failure->state.size() == 2 * n
                             ? VecX(ode.failure->state.head(n))
                             : ode.failure->state;
    out.failure = std::move(ode.failure);
  }
  return out;
}

GeodesicTrace exp_map(const SmoothMap& map, const VecX& p, const VecX& u, double t_end,
                      const GeodesicControls& controls) {
  GeodesicOutcome out = exp_map_ex(map, p, u, t_end, controls);
  if (out.failure) {
    const OdeFailure& f = *out.failure;
    switch (f.kind) {
      case FailureKind::PathDiverged: {
        PathDiverged e(f.detail);
        e.set_location(f.t, f.state);
        throw e;
      }
      case FailureKind::MaxStepsExceeded: {
        MaxStepsExceeded e(f.detail);
        e.set_location(f.t, f.state);
        throw e;
      }
      default: {
        SingularJacobian e(f.detail);
        e.set_location(f.t, f.state);
        throw e;
      }
    }
  }
  return out.trace;
}

double speed(const SmoothMap& map, const GeodesicState& s) {
  return (map.jacobian(s.position) * s.velocity).norm();
}

void write_trace_csv(std::ostream& out, const SmoothMap& map, const GeodesicTrace& trace) {
  const int n = map.dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",pos_" << i;
  for (int i = 1; i <= n; ++i) out << ",vel_" << i;
  out << ",speed";
  for (int i = 1; i <= n; ++i) out << ",image_" << i;
  out << "\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const GeodesicState& s = trace.states[k];
    const VecX image = map.value(s.position);
    out << format_double(trace.t[k]);
    for (int i = 0; i < n; ++i) out << "," << format_double(s.position[i]);
    for (int i = 0; i < n; ++i) out << "," << format_double(s.velocity[i]);
    out << "," << format_double(speed(map, s));
    for (int i = 0; i < n; ++i) out << "," << format_double(image[i]);
    out << "\n";
  }
}

}  // namespace hadinv
