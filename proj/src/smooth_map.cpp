#include "hadinv/smooth_map.hpp"

#include <cmath>

namespace hadinv {

SmoothMap::SmoothMap(int dim, EvalFn eval, JacobianFn jacobian,
                     SecondDerivativeFn second_derivative)
    : dim_(dim),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      second_derivative_(std::move(second_derivative)) {
  if (dim_ < 1) throw DimensionMismatch("SmoothMap: dimension must be >= 1");
  if (!eval_ || !jacobian_ || !second_derivative_)
    throw std::invalid_argument("SmoothMap: value, Jacobian and second derivatives are all required");
}

void SmoothMap::check_point(const VecX& x) const {
  if (x.size() != dim_)
    throw DimensionMismatch("SmoothMap: point has length " + std::to_string(x.size()) +
                            ", map has dimension " + std::to_string(dim_));
}

VecX SmoothMap::value(const VecX& x) const {
  check_point(x);
  return eval_(x);
}

MatX SmoothMap::jacobian(const VecX& x) const {
  check_point(x);
  return jacobian_(x);
}

Tensor3 SmoothMap::second_derivative(const VecX& x) const {
  check_point(x);
  return second_derivative_(x);
}

FdCheckResult fd_check(const SmoothMap& map, const VecX& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check: step must be positive");
  const int n = map.dim();

  const MatX jac = map.jacobian(x);
  const Tensor3 hess = map.second_derivative(x);
  const VecX f0 = map.value(x);

  double jac_error = 0.0;
  double hess_error = 0.0;

  auto shifted = [&](int i, double di, int j, double dj) {
    VecX xs = x;
    xs[i] += di;
    if (j >= 0) xs[j] += dj;
    return map.value(xs);
  };

  for (int j = 0; j < n; ++j) {
    const VecX fp = shifted(j, h, -1, 0.0);
    const VecX fm = shifted(j, -h, -1, 0.0);
    const VecX col = (fp - fm) / (2.0 * h);
    jac_error = std::max(jac_error, (col - jac.col(j)).cwiseAbs().maxCoeff());

    // diagonal second difference
    const VecX d2 = (fp - 2.0 * f0 + fm) / (h * h);
    for (int a = 0; a < n; ++a)
      hess_error = std::max(hess_error, std::abs(d2[a] - hess[a](j, j)));
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const VecX fpp = shifted(i, h, j, h);
      const VecX fpm = shifted(i, h, j, -h);
      const VecX fmp = shifted(i, -h, j, h);
      const VecX fmm = shifted(i, -h, j, -h);
      const VecX mixed = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      for (int a = 0; a < n; ++a)
        hess_error = std::max(hess_error, std::abs(mixed[a] - hess[a](i, j)));
    }
  }

  return {jac_error, hess_error};
}

}  // namespace hadinv
