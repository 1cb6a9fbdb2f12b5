#include "hadinv/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hadinv {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dormand-Prince RK5(4)7M coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// 5th-order weights minus the embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

double error_norm(const VecX& err, const VecX& y0, const VecX& y1, double atol, double rtol) {
  double acc = 0.0;
  for (int i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = err[i] / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

// Starting step size estimate (order 5).
double initial_step(const OdeProblem& p, const VecX& f0) {
  const int n = static_cast<int>(p.y0.size());
  double d0 = 0.0, d1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sc = p.atol + p.rtol * std::abs(p.y0[i]);
    d0 += (p.y0[i] / sc) * (p.y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / n);
  d1 = std::sqrt(d1 / n);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
  h0 = std::min(h0, p.t1 - p.t0);

  const VecX y1 = p.y0 + h0 * f0;
  const VecX f1 = p.rhs(p.t0 + h0, y1);
  double d2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sc = p.atol + p.rtol * std::abs(p.y0[i]);
    const double q = (f1[i] - f0[i]) / sc;
    d2 += q * q;
  }
  d2 = std::sqrt(d2 / n) / h0;

  const double dmax = std::max(d1, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                  : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, p.t1 - p.t0});
}

void validate(const OdeProblem& p) {
  if (!p.rhs) throw std::invalid_argument("OdeProblem: rhs not set");
  if (!(p.t0 < p.t1)) throw std::invalid_argument("OdeProblem: requires t0 < t1");
  if (!(p.rtol > 0.0) || !(p.atol > 0.0))
    throw std::invalid_argument("OdeProblem: tolerances must be positive");
  if (p.y0.size() < 1) throw std::invalid_argument("OdeProblem: empty initial state");
  if (!p.y0.allFinite()) throw std::invalid_argument("OdeProblem: initial state not finite");
  if (!(p.state_bound > p.y0.norm()))
    throw std::invalid_argument("OdeProblem: state_bound must exceed |y0|");
  if (p.max_steps < 1) throw std::invalid_argument("OdeProblem: max_steps must be positive");
}

}  // namespace

OdeOutcome integrate_adaptive_ex(const OdeProblem& p) {
  validate(p);

  OdeOutcome out;
  OdeTrace& trace = out.trace;

  double t = p.t0;
  VecX y = p.y0;
  trace.t.push_back(t);
  trace.y.push_back(y);

  auto eval_rhs = [&p](double te, const VecX& ye) -> VecX {
    try {
      return p.rhs(te, ye);
    } catch (SingularJacobian& e) {
      e.set_location(te, ye);
      throw;
    } catch (PathDiverged& e) {
      e.set_location(te, ye);
      throw;
    }
  };

  auto fail = [&](FailureKind kind, double tf, const VecX& yf, std::string detail) {
    out.failure = OdeFailure{kind, tf, yf, std::move(detail)};
  };

  VecX k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size()),
      k7(y.size());

  try {
    k1 = eval_rhs(t, y);
    double h = initial_step(p, k1);

    // PI controller state (Hairer's dopri5 defaults).
    constexpr double safe = 0.9, beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double facc1 = 1.0 / 0.2;   // max shrink per step: 5x
    constexpr double facc2 = 1.0 / 10.0;  // max growth per step: 10x
    double facold = 1e-4;
    bool rejected_last = false;

    int steps = 0;
    while (t < p.t1) {
      if (++steps > p.max_steps) {
        fail(FailureKind::MaxStepsExceeded,
             t, y, "step count exceeded " + std::to_string(p.max_steps));
        return out;
      }
      bool last = false;
      if (t + h >= p.t1) {
        h = p.t1 - t;
        last = true;
      }
      // The landing step may legitimately be shorter than the underflow
      // floor; everywhere else a step this small means the solution has
      // stopped being representable.
      const double hmin = 32.0 * kEps * std::max(1.0, std::abs(t));
      if (h < hmin && !last) {
        fail(FailureKind::PathDiverged, t, y, "step size underflow (h = " + format_double(h) + ")");
        return out;
      }

      k2 = eval_rhs(t + c2 * h, y + h * (a21 * k1));
      k3 = eval_rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = eval_rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = eval_rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = eval_rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const VecX ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = eval_rhs(t + h, ynew);  // FSAL

      const VecX errv =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double err = error_norm(errv, y, ynew, p.atol, p.rtol);

      if (!std::isfinite(err)) {
        trace.rejected++;
        rejected_last = true;
        h /= 5.0;
        continue;
      }

      const double fac11 = std::pow(err, expo1);
      if (err <= 1.0) {
        // accept
        facold = std::max(err, 1e-4);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;
        if (rejected_last) hnew = std::min(hnew, h);
        rejected_last = false;

        t = last ? p.t1 : t + h;
        y = ynew;
        k1 = k7;
        trace.accepted++;
        trace.t.push_back(t);
        trace.y.push_back(y);

        if (y.norm() > p.state_bound) {
          fail(FailureKind::PathDiverged, t, y,
               "state escaped bound " + format_double(p.state_bound));
          return out;
        }
        h = hnew;
      } else {
        trace.rejected++;
        rejected_last = true;
        h = h / std::min(facc1, fac11 / safe);
      }
    }
  } catch (const SingularJacobian& e) {
    fail(FailureKind::SingularJacobian, e.t.value_or(t), e.state.size() ? e.state : y, e.what());
    return out;
  } catch (const PathDiverged& e) {
    // rhs-level divergence detectors land here
    fail(FailureKind::PathDiverged, e.t.value_or(t), e.state.size() ? e.state : y, e.what());
    return out;
  }
  return out;
}

OdeTrace integrate_adaptive(const OdeProblem& p) {
  OdeOutcome out = integrate_adaptive_ex(p);
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
      case FailureKind::SingularJacobian: {
        SingularJacobian e(f.detail);
        e.set_location(f.t, f.state);
        throw e;
      }
      default:
        throw NumericError(f.detail);
    }
  }
  return out.trace;
}

std::string failure_kind_name(FailureKind kind) {
  switch (kind) {
    case FailureKind::PathDiverged: return "path_diverged";
    case FailureKind::SingularJacobian: return "singular_jacobian";
    case FailureKind::MaxStepsExceeded: return "max_steps_exceeded";
    case FailureKind::ToleranceNotMet: return "tolerance_not_met";
  }
  return "unknown";
}

}  // namespace hadinv
