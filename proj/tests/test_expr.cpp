#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hadinv/expr.hpp"
#include "oracles.hpp"

using namespace hadinv;
using oracles::random_ast;

namespace {

constexpr double kPi = 3.14159265358979323846;

SmoothMap one_component(const std::string& rhs) {
  return to_smooth_map(parse_map_file("dim 1\nf1 = " + rhs + "\n"));
}

}  // namespace

TEST_CASE("parse builds the expected tree shape") {
  const MapAst ast = parse_map_file("dim 1\nf1 = x1 + 0.5*sin(x1)");
  REQUIRE(ast.dim == 1);
  const ExprPtr root = ast.components[0];
  REQUIRE(root->kind == ExprKind::Binary);
  CHECK(root->bop == BinaryOp::Add);
  CHECK(root->a->kind == ExprKind::Variable);
  CHECK(root->a->var_index == 1);
  REQUIRE(root->b->kind == ExprKind::Binary);
  CHECK(root->b->bop == BinaryOp::Mul);
  CHECK(root->b->a->kind == ExprKind::Constant);
  CHECK(root->b->a->constant == 0.5);
  REQUIRE(root->b->b->kind == ExprKind::Unary);
  CHECK(root->b->b->uop == UnaryOp::Sin);
  CHECK(root->b->b->a->var_index == 1);
}

TEST_CASE("parse accepts the two-component exponential map file") {
  const MapAst ast = parse_map_file(
      "dim 2\n"
      "f1 = exp(x1)*cos(x2)\n"
      "f2 = exp(x1)*sin(x2)\n");
  CHECK(ast.dim == 2);
  CHECK(ast.components[0]->bop == BinaryOp::Mul);
  CHECK(ast.components[1]->bop == BinaryOp::Mul);
}

TEST_CASE("parse reports position and expectation on malformed input") {
  try {
    parse_map_file("dim 1\nf1 = x1 +");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_map_file("dim 2\nf1 = x1\nf1 = x2"), ParseError);   // duplicate
  CHECK_THROWS_AS(parse_map_file("dim 2\nf1 = x1"), ParseError);            // missing f2
  CHECK_THROWS_AS(parse_map_file("dim 1\nf1 = x2"), ParseError);            // var out of range
  CHECK_THROWS_AS(parse_map_file("dim 1\nf1 = foo(x1)"), ParseError);       // unknown function
  CHECK_THROWS_AS(parse_map_file("f1 = x1"), ParseError);                   // missing dim
  CHECK_THROWS_AS(parse_map_file("dim 1\nf2 = x1"), ParseError);            // index out of range
}

TEST_CASE("oversized indices are rejected instead of overflowing") {
  CHECK_THROWS_AS(parse_map_file("dim 999999999999\nf1 = x1"), ParseError);
  CHECK_THROWS_AS(parse_map_file("dim 2.5\nf1 = x1"), ParseError);
  CHECK_THROWS_AS(parse_map_file("dim 1\nf1 = x999999999999"), ParseError);
}

TEST_CASE("comments, blank lines, and whitespace are tolerated") {
  const MapAst ast = parse_map_file(
      "# a map with commentary\n"
      "dim 2\n"
      "\n"
      "f2 = x2          # components may come in any order\n"
      "f1 = x1 + pi     # with trailing comments\n"
      "\n");
  CHECK(ast.dim == 2);
  CHECK(ast.components[0]->bop == BinaryOp::Add);
  CHECK(ast.components[0]->b->constant == kPi);
  CHECK(ast.components[1]->kind == ExprKind::Variable);
}

TEST_CASE("unary minus binds below exponentiation") {
  // -x1^2 must parse as -(x1^2)
  const MapAst ast = parse_map_file("dim 1\nf1 = -x1^2");
  const ExprPtr root = ast.components[0];
  REQUIRE(root->kind == ExprKind::Unary);
  CHECK(root->uop == UnaryOp::Neg);
  REQUIRE(root->a->kind == ExprKind::Binary);
  CHECK(root->a->bop == BinaryOp::Pow);

  const SmoothMap m = to_smooth_map(ast);
  CHECK(m.value(VecX::Constant(1, 3.0))[0] == -9.0);
}

TEST_CASE("caret is right-associative") {
  // 2^3^2 = 2^(3^2) = 512; left association would give 64
  const SmoothMap m = one_component("2^3^2");
  CHECK(m.value(VecX::Zero(1))[0] == doctest::Approx(512.0).epsilon(1e-13));
}

TEST_CASE("number lexing distinguishes exponents from the Euler constant") {
  CHECK(one_component("2e3").value(VecX::Zero(1))[0] == 2000.0);
  CHECK(one_component("2*e").value(VecX::Zero(1))[0] ==
        doctest::Approx(2.0 * 2.718281828459045).epsilon(1e-16));
  CHECK(one_component("1.5e-2").value(VecX::Zero(1))[0] == 0.015);
}

TEST_CASE("hyper-dual powers and trig at hand points") {
  const SmoothMap sq = one_component("x1^2");
  const VecX x3 = VecX::Constant(1, 3.0);
  CHECK(sq.value(x3)[0] == 9.0);
  CHECK(sq.jacobian(x3)(0, 0) == 6.0);
  CHECK(sq.second_derivative(x3)[0](0, 0) == 2.0);

  const SmoothMap sn = one_component("sin(x1)");
  const VecX xp = VecX::Constant(1, kPi / 2.0);
  CHECK(sn.value(xp)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(sn.jacobian(xp)(0, 0)) <= 1e-15);
  CHECK(sn.second_derivative(xp)[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("parsed exponential map matches the builtin to machine precision") {
  const SmoothMap parsed = to_smooth_map(parse_map_file(
      "dim 2\n"
      "f1 = exp(x1)*cos(x2)\n"
      "f2 = exp(x1)*sin(x2)\n"));
  const SmoothMap builtin = make_expc();
  SplitMix64 rng(31415);
  for (int k = 0; k < 50; ++k) {
    const VecX x = rng.uniform_vector(2, -2.0, 2.0);
    CHECK((parsed.value(x) - builtin.value(x)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((parsed.jacobian(x) - builtin.jacobian(x)).cwiseAbs().maxCoeff() <= 1e-12);
    const Tensor3 hp = parsed.second_derivative(x);
    const Tensor3 hb = builtin.second_derivative(x);
    for (int a = 0; a < 2; ++a)
      CHECK((hp[a] - hb[a]).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("print/parse round trip preserves structure") {
  SplitMix64 rng(99);
  for (int k = 0; k < 100; ++k) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const MapAst ast = random_ast(rng, n, 6);
    const std::string text = print_map_file(ast);
    const MapAst reparsed = parse_map_file(text);
    CHECK(structurally_equal(ast, reparsed));
  }
}

TEST_CASE("hyper-dual first derivatives match central differences") {
  SplitMix64 rng(77);
  int checked = 0;
  while (checked < 100) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 3);
    const MapAst ast = random_ast(rng, n, 5);
    const VecX x = rng.uniform_vector(n, 0.4, 1.8);
    try {
      const SmoothMap map = to_smooth_map(ast);
      const auto gap = oracles::fd_jacobian_gap(map, x);
      if (!gap) continue;  // stencil not trustworthy at this draw
      CHECK(*gap <= 1e-6);
      ++checked;
    } catch (const DomainError&) {
      continue;  // draw strayed outside a partial function's domain
    }
  }
}

TEST_CASE("mixed second-order parts are symmetric bit for bit") {
  SplitMix64 rng(55);
  int checked = 0;
  while (checked < 50) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 2);
    const MapAst ast = random_ast(rng, n, 5);
    const VecX x = rng.uniform_vector(n, 0.4, 1.8);
    const int j = 1 + static_cast<int>(rng.next_u64() % n);
    const int k = 1 + static_cast<int>(rng.next_u64() % n);
    try {
      const HyperDual<double> jk = eval_component_hyperdual(ast, 1, x, j, k);
      const HyperDual<double> kj = eval_component_hyperdual(ast, 1, x, k, j);
      CHECK(jk.d12 == kj.d12);  // exact equality, not approximate
      ++checked;
    } catch (const DomainError&) {
      continue;
    }
  }
}

TEST_CASE("integer powers agree with repeated multiplication") {
  SplitMix64 rng(11);
  for (int m = 2; m <= 6; ++m) {
    const SmoothMap p = one_component("x1^" + std::to_string(m));
    std::string product = "x1";
    for (int i = 1; i < m; ++i) product += "*x1";
    const SmoothMap q = one_component(product);
    for (int k = 0; k < 20; ++k) {
      const VecX x = VecX::Constant(1, rng.uniform(-2.0, 2.0));
      const double a = p.value(x)[0], b = q.value(x)[0];
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)));
      const double da = p.jacobian(x)(0, 0), db = q.jacobian(x)(0, 0);
      CHECK(std::abs(da - db) <= 1e-12 * (1.0 + std::abs(db)));
      const double ha = p.second_derivative(x)[0](0, 0), hb = q.second_derivative(x)[0](0, 0);
      CHECK(std::abs(ha - hb) <= 1e-12 * (1.0 + std::abs(hb)));
    }
  }
}

TEST_CASE("negative bases accept integer exponents only") {
  const SmoothMap cube = one_component("x1^3");
  CHECK(cube.value(VecX::Constant(1, -2.0))[0] == -8.0);
  const SmoothMap frac = one_component("x1^0.5");
  CHECK_THROWS_AS(frac.value(VecX::Constant(1, -2.0)), DomainError);

  // a negated literal exponent still counts as a constant power
  const SmoothMap inv_sq = one_component("x1^-2");
  CHECK(inv_sq.value(VecX::Constant(1, -2.0))[0] == 0.25);
  CHECK(inv_sq.jacobian(VecX::Constant(1, -2.0))(0, 0) == 0.25);  // -2 x^-3
  CHECK_THROWS_AS(inv_sq.value(VecX::Zero(1)), DomainError);
}

TEST_CASE("domain violations are raised eagerly with the offending point") {
  const SmoothMap lg = one_component("log(x1)");
  try {
    lg.value(VecX::Constant(1, -1.0));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    REQUIRE(e.point.size() == 1);
    CHECK(e.point[0] == -1.0);
  }
  CHECK_THROWS_AS(lg.value(VecX::Zero(1)), DomainError);
  CHECK_THROWS_AS(one_component("sqrt(x1)").value(VecX::Constant(1, -0.5)), DomainError);
  CHECK_THROWS_AS(one_component("1/x1").value(VecX::Zero(1)), DomainError);
  CHECK_THROWS_AS(one_component("exp(x1)").value(VecX::Constant(1, 1000.0)), DomainError);

  // fine away from the singularities
  CHECK(one_component("1/x1").value(VecX::Constant(1, 4.0))[0] == 0.25);
  CHECK(one_component("sqrt(x1)").value(VecX::Constant(1, 9.0))[0] == 3.0);
}

TEST_CASE("variable exponents use the exponential rewrite") {
  const SmoothMap m = one_component("x1^x1");
  const VecX x = VecX::Constant(1, 2.0);
  CHECK(m.value(x)[0] == doctest::Approx(4.0).epsilon(1e-14));
  // d/dx x^x = x^x (log x + 1)
  CHECK(m.jacobian(x)(0, 0) == doctest::Approx(4.0 * (std::log(2.0) + 1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(m.value(VecX::Constant(1, -1.0)), DomainError);
}
