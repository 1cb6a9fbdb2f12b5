#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hadinv/cli.hpp"
#include "hadinv/expr.hpp"
#include "hadinv/linalg.hpp"
#include "hadinv/solver.hpp"

namespace hadinv {

namespace {

struct SuiteResult {
  bool pass;
  std::string detail;
};

SuiteResult pass(const std::string& detail) { return {true, detail}; }
SuiteResult fail(const std::string& detail) { return {false, detail}; }

MatX random_matrix(SplitMix64& rng, int n, double lo, double hi) {
  MatX m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

MatX random_orthogonal(SplitMix64& rng, int n) {
  const MatX m = random_matrix(rng, n, -1.0, 1.0);
  return Eigen::HouseholderQR<MatX>(m).householderQ();
}

std::vector<SmoothMap> small_corpus() {
  std::vector<SmoothMap> maps;
  maps.push_back(make_identity(2));
  maps.push_back(make_linear_default(3));
  maps.push_back(make_sinperturb(0.5, 3));
  maps.push_back(make_cyclosin(0.4, 3));
  maps.push_back(make_shear2());
  maps.push_back(make_expc());
  return maps;
}

// --- compact random expression generator (diagnostics only) ---------------

ExprPtr random_expr(SplitMix64& rng, int n_vars, int depth) {
  const double pick = rng.next_double();
  if (depth <= 0 || pick < 0.25) {
    if (rng.next_double() < 0.5)
      return ExprNode::make_constant(rng.uniform(0.0, 2.5));
    return ExprNode::make_variable(1 + static_cast<int>(rng.next_u64() % n_vars));
  }
  if (pick < 0.55) {
    static const UnaryOp ops[] = {UnaryOp::Neg,  UnaryOp::Sin,  UnaryOp::Cos, UnaryOp::Tan,
                                  UnaryOp::Exp,  UnaryOp::Log,  UnaryOp::Sqrt, UnaryOp::Tanh,
                                  UnaryOp::Sinh, UnaryOp::Cosh, UnaryOp::Atan};
    return ExprNode::make_unary(ops[rng.next_u64() % 11], random_expr(rng, n_vars, depth - 1));
  }
  static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                                 BinaryOp::Pow};
  const BinaryOp op = ops[rng.next_u64() % 5];
  if (op == BinaryOp::Pow) {
    // integer exponent keeps the domain simple
    return ExprNode::make_binary(
        BinaryOp::Pow, random_expr(rng, n_vars, depth - 1),
        ExprNode::make_constant(static_cast<double>(1 + rng.next_u64() % 3)));
  }
  return ExprNode::make_binary(op, random_expr(rng, n_vars, depth - 1),
                               random_expr(rng, n_vars, depth - 1));
}

MapAst random_ast(SplitMix64& rng, int n, int depth) {
  MapAst ast;
  ast.dim = n;
  for (int i = 0; i < n; ++i) ast.components.push_back(random_expr(rng, n, depth));
  return ast;
}

// ---------------------------------------------------------------------------

SuiteResult suite_solve_roundtrip() {
  SplitMix64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 8);
    const MatX q1 = random_orthogonal(rng, n), q2 = random_orthogonal(rng, n);
    VecX sv(n);
    for (int i = 0; i < n; ++i) sv[i] = rng.uniform(0.5, 2.0);
    const MatX a = q1 * sv.asDiagonal() * q2;
    const VecX b = rng.uniform_vector(n, -3.0, 3.0);
    const VecX x = solve_linear(a, b);
    worst = std::max(worst, (a * x - b).norm() / (1.0 + b.norm()));
  }
  if (worst > 1e-10) return fail("residual " + format_double(worst));
  return pass("max |Ax-b|/(1+|b|) = " + format_double(worst));
}

SuiteResult suite_sigma_min() {
  SplitMix64 rng(1002);
  MatX d = MatX::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 0.5;
  if (std::abs(sigma_min(d) - 0.5) > 1e-14) return fail("diagonal case");
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 3);
    const MatX a = random_matrix(rng, n, -2.0, 2.0);
    const MatX q = random_orthogonal(rng, n);
    worst = std::max(worst, std::abs(sigma_min(q * a) - sigma_min(a)));
  }
  if (worst > 1e-10) return fail("rotation invariance off by " + format_double(worst));
  return pass("rotation invariance gap = " + format_double(worst));
}

SuiteResult suite_ode() {
  OdeProblem p;
  p.y0 = VecX::Constant(1, 1.0);
  p.rhs = [](double, const VecX& y) { return y; };
  const OdeTrace tr = integrate_adaptive(p);
  const double e_err = std::abs(tr.y.back()[0] - 2.718281828459045);
  if (e_err > 1e-8) return fail("exp(1) error " + format_double(e_err));

  OdeProblem rot;
  rot.y0 = VecX(2);
  rot.y0 << 1.0, 0.0;
  rot.rhs = [](double, const VecX& y) {
    VecX dy(2);
    dy << y[1], -y[0];
    return dy;
  };
  const VecX yf = integrate_adaptive(rot).y.back();
  const double rot_err =
      std::hypot(yf[0] - std::cos(1.0), yf[1] + std::sin(1.0));
  if (rot_err > 1e-8) return fail("rotation error " + format_double(rot_err));

  OdeProblem blow;
  blow.y0 = VecX::Constant(1, 1.0);
  blow.t1 = 2.0;
  blow.state_bound = 1e6;
  blow.rhs = [](double, const VecX& y) { return (y.array() * y.array()).matrix().eval(); };
  const OdeOutcome out = integrate_adaptive_ex(blow);
  if (!out.failure || out.failure->kind != FailureKind::PathDiverged)
    return fail("blow-up not flagged as path divergence");
  return pass("exp/rotation errors " + format_double(e_err) + ", " + format_double(rot_err));
}

SuiteResult suite_fd_consistency() {
  SplitMix64 rng(1004);
  double wj = 0.0, wh = 0.0;
  for (const SmoothMap& map : small_corpus()) {
    for (int k = 0; k < 10; ++k) {
      const VecX x = rng.uniform_vector(map.dim(), -5.0, 5.0);
      const FdCheckResult r = fd_check(map, x, 1e-4);
      wj = std::max(wj, r.jac_error);
      wh = std::max(wh, r.hess_error);
    }
  }
  if (wj > 1e-6 || wh > 1e-4)
    return fail("jac " + format_double(wj) + ", hess " + format_double(wh));
  return pass("jac " + format_double(wj) + ", hess " + format_double(wh));
}

SuiteResult suite_hessian_symmetry() {
  SplitMix64 rng(1005);
  for (const SmoothMap& map : small_corpus()) {
    for (int k = 0; k < 5; ++k) {
      const VecX x = rng.uniform_vector(map.dim(), -3.0, 3.0);
      const Tensor3 h = map.second_derivative(x);
      for (int a = 0; a < map.dim(); ++a)
        if (h[a] != h[a].transpose().eval()) return fail("asymmetric H slice");
    }
  }
  return pass("H[a] exactly symmetric on the corpus");
}

SuiteResult suite_sigma_bounds() {
  SplitMix64 rng(1006);
  const SmoothMap sp = make_sinperturb(0.5, 3);
  const SmoothMap ec = make_expc();
  for (int k = 0; k < 20; ++k) {
    const VecX x = rng.uniform_vector(3, -10.0, 10.0);
    if (sigma_min(sp.jacobian(x)) < 0.5 - 1e-12) return fail("sinperturb bound broken");
    const VecX z = rng.uniform_vector(2, -2.0, 2.0);
    const double expect = std::exp(z[0]);
    if (std::abs(sigma_min(ec.jacobian(z)) - expect) > 1e-10 * expect)
      return fail("expc sigma_min != exp(x1)");
  }
  return pass("sinperturb >= 1-alpha; expc == exp(x1)");
}

SuiteResult suite_expr_roundtrip() {
  SplitMix64 rng(1007);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 3);
    const MapAst ast = random_ast(rng, n, 6);
    const MapAst reparsed = parse_map_file(print_map_file(ast));
    if (!structurally_equal(ast, reparsed)) return fail("round trip changed the tree");
  }
  return pass("parse(print(ast)) == ast for 30 random trees");
}

SuiteResult suite_hyperdual_fd() {
  SplitMix64 rng(1008);
  double worst = 0.0;
  int checked = 0;
  while (checked < 30) {
    const int n = 2;
    const MapAst ast = random_ast(rng, n, 5);
    const VecX x = rng.uniform_vector(n, 0.4, 1.6);
    try {
      const SmoothMap map = to_smooth_map(ast);
      if (map.value(x).cwiseAbs().maxCoeff() > 100.0) continue;  // stencil would be noise
      const MatX jac = map.jacobian(x);
      if (jac.cwiseAbs().maxCoeff() > 1e3) continue;
      bool usable = true;
      double local = 0.0;
      for (int j = 0; j < n && usable; ++j) {
        VecX fd_h[2];
        const double steps[2] = {1e-6, 1e-5};
        for (int s = 0; s < 2; ++s) {
          VecX xp = x, xm = x;
          xp[j] += steps[s];
          xm[j] -= steps[s];
          fd_h[s] = (map.value(xp) - map.value(xm)) / (2.0 * steps[s]);
        }
        if ((fd_h[0] - fd_h[1]).cwiseAbs().maxCoeff() >
            1e-7 * (1.0 + fd_h[0].cwiseAbs().maxCoeff())) {
          usable = false;  // differences not converged in h
          break;
        }
        for (int a = 0; a < n; ++a)
          local = std::max(local,
                           std::abs(fd_h[0][a] - jac(a, j)) / (1.0 + std::abs(jac(a, j))));
      }
      if (!usable) continue;
      worst = std::max(worst, local);
      ++checked;
    } catch (const DomainError&) {
      continue;  // resample
    }
  }
  if (worst > 1e-6) return fail("fd gap " + format_double(worst));
  return pass("max relative fd gap = " + format_double(worst));
}

SuiteResult suite_expr_expc_match() {
  const char* text =
      "dim 2\n"
      "f1 = exp(x1)*cos(x2)\n"
      "f2 = exp(x1)*sin(x2)\n";
  const SmoothMap parsed = to_smooth_map(parse_map_file(text));
  const SmoothMap builtin = make_expc();
  SplitMix64 rng(1009);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const VecX x = rng.uniform_vector(2, -2.0, 2.0);
    worst = std::max(worst, (parsed.value(x) - builtin.value(x)).norm());
    worst = std::max(worst, (parsed.jacobian(x) - builtin.jacobian(x)).norm());
    const Tensor3 hp = parsed.second_derivative(x), hb = builtin.second_derivative(x);
    for (int a = 0; a < 2; ++a) worst = std::max(worst, (hp[a] - hb[a]).norm());
  }
  if (worst > 1e-12) return fail("mismatch " + format_double(worst));
  return pass("max |parsed - builtin| = " + format_double(worst));
}

SuiteResult suite_isometry() {
  SplitMix64 rng(1010);
  double worst = 0.0;
  for (const SmoothMap& map : small_corpus()) {
    for (int k = 0; k < 20; ++k) {
      const VecX x = rng.uniform_vector(map.dim(), -2.0, 2.0);
      const VecX u = rng.uniform_vector(map.dim(), -1.0, 1.0);
      const VecX v = rng.uniform_vector(map.dim(), -1.0, 1.0);
      const MetricTensor g = metric_tensor(map, x);
      const MatX j = map.jacobian(x);
      worst = std::max(worst, std::abs(u.dot(g.g * v) - (j * u).dot(j * v)));
    }
  }
  if (worst > 1e-12) return fail("pullback identity off by " + format_double(worst));
  return pass("max |u'Gv - (Ju).(Jv)| = " + format_double(worst));
}

SuiteResult suite_christoffel(FaultInjection fault) {
  SplitMix64 rng(1011);
  double worst = 0.0;
  for (const SmoothMap& map : small_corpus()) {
    for (int k = 0; k < 10; ++k) {
      VecX x = rng.uniform_vector(map.dim(), -1.5, 1.5);
      ChristoffelTensor metric_route = christoffel_metric(map, x);
      const ChristoffelTensor push_route = christoffel_pushforward(map, x);
      if (fault == FaultInjection::ChristoffelSign)
        metric_route.gamma[0](0, 0) = -metric_route.gamma[0](0, 0);
      for (int a = 0; a < map.dim(); ++a)
        worst = std::max(
            worst, (metric_route.gamma[a] - push_route.gamma[a]).cwiseAbs().maxCoeff());
    }
  }
  if (worst > 1e-9) return fail("route disagreement " + format_double(worst));

  // hand values
  const SmoothMap shear = make_shear2();
  VecX xs(2);
  xs << 0.7, -1.3;
  ChristoffelTensor ct = christoffel_pushforward(shear, xs);
  if (fault == FaultInjection::ChristoffelSign) ct.gamma[1](0, 0) = -ct.gamma[1](0, 0);
  if (std::abs(ct.gamma[1](0, 0) - 2.0) > 1e-10) return fail("shear coefficient != 2");

  const SmoothMap ec = make_expc();
  const ChristoffelTensor co = christoffel_metric(ec, VecX::Zero(2));
  if (std::abs(co.gamma[0](0, 0) - 1.0) > 1e-10 || std::abs(co.gamma[0](1, 1) + 1.0) > 1e-10 ||
      std::abs(co.gamma[1](0, 1) - 1.0) > 1e-10)
    return fail("exp-map coefficients at origin wrong");
  return pass("route gap " + format_double(worst) + "; hand values match");
}

SuiteResult suite_conservation() {
  SplitMix64 rng(1012);
  double worst_drift = 0.0, worst_line = 0.0;
  std::vector<SmoothMap> maps;
  maps.push_back(make_sinperturb(0.5, 2));
  maps.push_back(make_cyclosin(0.4, 3));
  maps.push_back(make_shear2());
  for (const SmoothMap& map : maps) {
    for (int k = 0; k < 3; ++k) {
      const VecX p = rng.uniform_vector(map.dim(), -2.0, 2.0);
      const VecX u = rng.uniform_vector(map.dim(), -1.5, 1.5);
      if (u.norm() == 0.0) continue;
      const GeodesicTrace tr = exp_map(map, p, u, 1.0);
      const double s0 = speed(map, tr.states.front());
      const VecX fp = map.value(p);
      const VecX ju = map.jacobian(p) * u;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        worst_drift =
            std::max(worst_drift, std::abs(speed(map, tr.states[i]) - s0) / s0);
        const VecX expect = fp + tr.t[i] * ju;
        worst_line = std::max(worst_line, (map.value(tr.states[i].position) - expect).norm() /
                                              (1.0 + ju.norm()));
      }
    }
  }
  if (worst_drift > 1e-6) return fail("speed drift " + format_double(worst_drift));
  if (worst_line > 1e-6) return fail("image bends off the line by " + format_double(worst_line));
  return pass("speed drift " + format_double(worst_drift) + ", image straight to " +
              format_double(worst_line));
}

SuiteResult suite_inversion_roundtrip() {
  SplitMix64 rng(1013);
  double worst_res = 0.0, worst_err = 0.0;
  for (const int n : {1, 3}) {
    std::vector<SmoothMap> maps;
    maps.push_back(make_identity(n));
    maps.push_back(make_linear_default(n));
    maps.push_back(make_sinperturb(0.5, n));
    maps.push_back(make_cyclosin(0.4, n));
    for (const SmoothMap& map : maps) {
      for (int k = 0; k < 10; ++k) {
        const VecX x_true = rng.uniform_vector(n, -10.0, 10.0);
        const InversionReport rep = invert(map, map.value(x_true), {});
        if (!rep.ok()) return fail("inversion failed on a Hadamard map");
        worst_res = std::max(worst_res, rep.residual);
        worst_err = std::max(worst_err, (rep.solution - x_true).norm());
      }
    }
  }
  if (worst_res > 1e-10 || worst_err > 1e-8)
    return fail("residual " + format_double(worst_res) + ", error " + format_double(worst_err));
  return pass("residual <= " + format_double(worst_res) + ", error <= " +
              format_double(worst_err));
}

SuiteResult suite_method_agreement() {
  SplitMix64 rng(1014);
  double worst = 0.0;
  std::vector<SmoothMap> maps;
  maps.push_back(make_sinperturb(0.5, 2));
  maps.push_back(make_cyclosin(0.4, 3));
  for (const SmoothMap& map : maps) {
    for (int k = 0; k < 5; ++k) {
      const VecX y = map.value(rng.uniform_vector(map.dim(), -5.0, 5.0));
      const InversionReport rc = invert_continuation(map, y, {});
      const InversionReport rg = invert_geodesic(map, y, {});
      if (!rc.ok() || !rg.ok()) return fail("route failed unexpectedly");
      worst = std::max(
          worst, (rc.trace.back().position - rg.trace.back().position).norm());
    }
  }
  if (worst > 1e-6) return fail("pre-polish gap " + format_double(worst));
  return pass("max pre-polish gap = " + format_double(worst));
}

SuiteResult suite_hadamard_estimates() {
  const SmoothMap sp = make_sinperturb(0.5, 1);
  const HadamardEstimate e1 = estimate_hadamard(sp, {{-10.0, 10.0}}, 2001, 0, false, 7);
  if (std::abs(e1.c_hat - 0.25) > 0.0025) return fail("sinperturb c_hat " + format_double(e1.c_hat));

  const SmoothMap ec = make_expc();
  const Box box{{-1.0, 1.0}, {-3.141592653589793, 3.141592653589793}};
  const HadamardEstimate e2 = estimate_hadamard(ec, box, 41, 0, false, 7);
  const double expect = std::exp(-2.0);
  if (std::abs(e2.c_hat - expect) > 0.01 * expect)
    return fail("expc c_hat " + format_double(e2.c_hat));
  return pass("c_hat(sinperturb) = " + format_double(e1.c_hat) +
              ", c_hat(expc,R=1) = " + format_double(e2.c_hat));
}

SuiteResult suite_lipschitz() {
  for (const auto& [map, c_hat] :
       {std::pair<SmoothMap, double>{make_identity(2), 1.0},
        {make_linear_default(2), 0.0},  // estimated below
        {make_sinperturb(0.5, 2), 0.25},
        {make_cyclosin(0.4, 2), 0.36}}) {
    Box box{{-10.0, 10.0}, {-10.0, 10.0}};
    double c = c_hat;
    if (c == 0.0) c = estimate_hadamard(map, box, 21, 0, false, 7).c_hat;
    const LipschitzProbeReport rep = lipschitz_probe(map, c, 200, box, 11);
    if (!rep.violations.empty()) return fail("unexpected lower-Lipschitz violation");
  }
  VecX p0 = VecX::Zero(2), p1(2);
  p1 << 0.0, 2.0 * 3.141592653589793;
  const LipschitzProbeReport inj =
      lipschitz_probe(make_expc(), 1.0, 0, Box{{-1.0, 1.0}, {-7.0, 7.0}}, 11, {{p0, p1}});
  if (inj.violations.size() != 1) return fail("injected periodic pair not flagged");
  return pass("0 violations on the corpus; injected pair flagged");
}

SuiteResult suite_failure_honesty() {
  const InversionReport rep = invert(make_expc(), VecX::Zero(2), {});
  if (rep.ok()) return fail("inverting an unattainable target 'succeeded'");
  if (rep.failure->kind != FailureKind::PathDiverged)
    return fail("expected path divergence, got " + failure_kind_name(rep.failure->kind));
  if (!(rep.failure->position[0] < -10.0))
    return fail("final x1 = " + format_double(rep.failure->position[0]) + ", expected < -10");
  return pass("path_diverged with final x1 = " + format_double(rep.failure->position[0]));
}

}  // namespace

int run_selftest(std::ostream& out, FaultInjection fault) {
  using Suite = std::pair<const char*, std::function<SuiteResult()>>;
  const std::vector<Suite> suites = {
      {"linalg.solve_roundtrip", suite_solve_roundtrip},
      {"linalg.sigma_min", suite_sigma_min},
      {"ode.integrator", suite_ode},
      {"map.fd_consistency", suite_fd_consistency},
      {"map.hessian_symmetry", suite_hessian_symmetry},
      {"map.sigma_bounds", suite_sigma_bounds},
      {"expr.roundtrip", suite_expr_roundtrip},
      {"expr.hyperdual_fd", suite_hyperdual_fd},
      {"expr.expc_match", suite_expr_expc_match},
      {"geometry.isometry", suite_isometry},
      {"geometry.christoffel_agreement", [fault] { return suite_christoffel(fault); }},
      {"geometry.conservation", suite_conservation},
      {"solver.inversion_roundtrip", suite_inversion_roundtrip},
      {"solver.method_agreement", suite_method_agreement},
      {"solver.hadamard_estimates", suite_hadamard_estimates},
      {"solver.lipschitz", suite_lipschitz},
      {"solver.failure_honesty", suite_failure_honesty},
  };

  int passed = 0;
  for (const auto& [name, fn] : suites) {
    SuiteResult result{false, ""};
    try {
      result = fn();
    } catch (const std::exception& e) {
      result = fail(std::string("exception: ") + e.what());
    }
    out << (result.pass ? "[PASS] " : "[FAIL] ") << std::left << std::setw(34) << name
        << " " << result.detail << "\n";
    if (result.pass) ++passed;
  }
  out << "selftest: " << passed << "/" << suites.size() << " suites passed\n";
  return passed == static_cast<int>(suites.size()) ? 0 : 1;
}

}  // namespace hadinv
