#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hadinv/linalg.hpp"
#include "hadinv/smooth_map.hpp"

using namespace hadinv;

namespace {

VecX vec2(double a, double b) {
  VecX v(2);
  v << a, b;
  return v;
}

std::vector<SmoothMap> corpus() {
  std::vector<SmoothMap> maps;
  maps.push_back(make_identity(2));
  maps.push_back(make_linear_default(2));
  maps.push_back(make_linear_default(3));
  maps.push_back(make_sinperturb(0.5, 1));
  maps.push_back(make_sinperturb(0.5, 3));
  maps.push_back(make_cyclosin(0.4, 3));
  maps.push_back(make_shear2());
  maps.push_back(make_expc());
  return maps;
}

}  // namespace

TEST_CASE("builtin values at reference points") {
  const SmoothMap ec = make_expc();
  const VecX f0 = ec.value(vec2(0.0, 0.0));
  CHECK(f0[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f0[1] == doctest::Approx(0.0).epsilon(1e-15));

  const SmoothMap lin = make_builtin("linear", 2);
  const VecX fl = lin.value(vec2(1.0, 3.0));
  CHECK(fl[0] == 5.0);
  CHECK(fl[1] == 3.0);

  const SmoothMap sp = make_builtin("sinperturb:0.5", 1);
  const MatX j = sp.jacobian(VecX::Zero(1));
  CHECK(j(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("builtin dimension constraints") {
  CHECK_THROWS_AS(make_builtin("shear2", 3), DimensionMismatch);
  CHECK_THROWS_AS(make_builtin("expc", 1), DimensionMismatch);
  CHECK_THROWS_AS(make_builtin("nosuchmap", 2), std::invalid_argument);
  CHECK_THROWS_AS(make_sinperturb(1.2, 2), std::invalid_argument);
  CHECK_THROWS_AS(make_builtin("sinperturb:1.5", 2), std::invalid_argument);
  const SmoothMap ok = make_builtin("cyclosin:0.4", 5);
  CHECK(ok.dim() == 5);
}

TEST_CASE("maps reject points of the wrong length") {
  const SmoothMap ec = make_expc();
  CHECK_THROWS_AS(ec.value(VecX::Zero(3)), DimensionMismatch);
  CHECK_THROWS_AS(ec.jacobian(VecX::Zero(1)), DimensionMismatch);
}

TEST_CASE("Jacobians at hand-computed points") {
  const SmoothMap ec = make_expc();
  const MatX j0 = ec.jacobian(vec2(0.0, 0.0));
  CHECK((j0 - MatX::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const MatX j1 = ec.jacobian(vec2(1.0, 0.0));
  const double e = std::exp(1.0);
  CHECK(j1(0, 0) == doctest::Approx(e).epsilon(1e-15));
  CHECK(j1(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(j1(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(j1(1, 1) == doctest::Approx(e).epsilon(1e-15));

  const SmoothMap sh = make_shear2();
  const MatX js = sh.jacobian(vec2(3.0, 7.0));
  CHECK(js(0, 0) == 1.0);
  CHECK(js(0, 1) == 0.0);
  CHECK(js(1, 0) == 6.0);
  CHECK(js(1, 1) == 1.0);
}

TEST_CASE("second derivatives at hand-computed points") {
  const SmoothMap lin = make_linear_default(3);
  const Tensor3 hl = lin.second_derivative(VecX::Zero(3));
  for (const MatX& slice : hl) CHECK(slice.cwiseAbs().maxCoeff() == 0.0);

  const SmoothMap sh = make_shear2();
  const Tensor3 hs = sh.second_derivative(vec2(-4.0, 9.0));
  CHECK(hs[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(hs[1](0, 0) == 2.0);
  CHECK(std::abs(hs[1](0, 1)) + std::abs(hs[1](1, 0)) + std::abs(hs[1](1, 1)) == 0.0);

  // second derivatives of (exp(x1)cos(x2), exp(x1)sin(x2)) at the origin
  const SmoothMap ec = make_expc();
  const Tensor3 he = ec.second_derivative(vec2(0.0, 0.0));
  MatX h1(2, 2), h2(2, 2);
  h1 << 1.0, 0.0, 0.0, -1.0;
  h2 << 0.0, 1.0, 1.0, 0.0;
  CHECK((he[0] - h1).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((he[1] - h2).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("fd_check at reference points") {
  const FdCheckResult id = fd_check(make_identity(2), vec2(0.4, -1.2), 1e-5);
  CHECK(id.jac_error <= 1e-9);

  const FdCheckResult sp = fd_check(make_sinperturb(0.5, 1), VecX::Constant(1, 0.3), 1e-5);
  CHECK(sp.jac_error <= 1e-8);

  const FdCheckResult ec = fd_check(make_expc(), vec2(0.5, 1.0), 1e-4);
  CHECK(ec.hess_error <= 1e-5);

  CHECK_THROWS_AS(fd_check(make_identity(2), vec2(0.0, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("fd consistency across the corpus") {
  SplitMix64 rng(2024);
  for (const SmoothMap& map : corpus()) {
    for (int k = 0; k < 100; ++k) {
      const VecX x = rng.uniform_vector(map.dim(), -5.0, 5.0);
      const FdCheckResult r = fd_check(map, x, 1e-4);
      CHECK(r.jac_error <= 1e-6);
      CHECK(r.hess_error <= 1e-4);
    }
  }
}

TEST_CASE("second-derivative slices are exactly symmetric") {
  SplitMix64 rng(2025);
  for (const SmoothMap& map : corpus()) {
    for (int k = 0; k < 20; ++k) {
      const VecX x = rng.uniform_vector(map.dim(), -5.0, 5.0);
      const Tensor3 h = map.second_derivative(x);
      for (int a = 0; a < map.dim(); ++a)
        for (int i = 0; i < map.dim(); ++i)
          for (int j = 0; j < map.dim(); ++j) CHECK(h[a](i, j) == h[a](j, i));
    }
  }
}

TEST_CASE("sinperturb keeps its diagonal singular-value bound") {
  SplitMix64 rng(2026);
  const double alpha = 0.5;
  const SmoothMap sp = make_sinperturb(alpha, 4);
  for (int k = 0; k < 100; ++k) {
    const VecX x = rng.uniform_vector(4, -20.0, 20.0);
    CHECK(sigma_min(sp.jacobian(x)) >= 1.0 - alpha - 1e-12);
  }
}

TEST_CASE("cyclosin stays above 1-alpha") {
  SplitMix64 rng(2027);
  const SmoothMap cs = make_cyclosin(0.4, 5);
  for (int k = 0; k < 100; ++k) {
    const VecX x = rng.uniform_vector(5, -20.0, 20.0);
    CHECK(sigma_min(cs.jacobian(x)) >= 0.6 - 1e-12);
  }
}

TEST_CASE("expc singular values collapse to the radial scale") {
  SplitMix64 rng(2028);
  const SmoothMap ec = make_expc();
  for (int k = 0; k < 100; ++k) {
    const VecX x = rng.uniform_vector(2, -3.0, 3.0);
    const double expect = std::exp(x[0]);
    CHECK(std::abs(sigma_min(ec.jacobian(x)) - expect) <= 1e-10 * expect);
  }
}

TEST_CASE("cyclosin wraps its coupling index") {
  // n = 1 degenerates to a self-coupling: f1 = x1 + a sin(x1)
  const SmoothMap cs = make_cyclosin(0.4, 1);
  const VecX x = VecX::Constant(1, 0.7);
  CHECK(cs.value(x)[0] == doctest::Approx(0.7 + 0.4 * std::sin(0.7)).epsilon(1e-15));
  CHECK(cs.jacobian(x)(0, 0) == doctest::Approx(1.0 + 0.4 * std::cos(0.7)).epsilon(1e-15));

  // n = 3: component i reads coordinate i+1 cyclically
  const SmoothMap c3 = make_cyclosin(0.4, 3);
  VecX x3(3);
  x3 << 0.2, 1.1, -0.8;
  const VecX f3 = c3.value(x3);
  CHECK(f3[0] == doctest::Approx(0.2 + 0.4 * std::sin(1.1)).epsilon(1e-15));
  CHECK(f3[1] == doctest::Approx(1.1 + 0.4 * std::sin(-0.8)).epsilon(1e-15));
  CHECK(f3[2] == doctest::Approx(-0.8 + 0.4 * std::sin(0.2)).epsilon(1e-15));
}

TEST_CASE("default linear map reduces to the documented 2x2 matrix") {
  const SmoothMap lin = make_linear_default(2);
  const MatX a = lin.jacobian(VecX::Zero(2));
  MatX expect(2, 2);
  expect << 2.0, 1.0, 0.0, 1.0;
  CHECK((a - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(make_linear(MatX::Ones(2, 2), VecX::Zero(2)), SingularJacobian);
}
