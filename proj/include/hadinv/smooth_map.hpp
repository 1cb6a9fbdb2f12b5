#pragma once

#include <functional>
#include <string>

#include "hadinv/common.hpp"

namespace hadinv {

/// A C^2 map f: R^n -> R^n. Construction requires value, Jacobian and the
/// second-derivative tensor; a map without second derivatives cannot exist
/// here, since the geodesic machinery consumes them.
class SmoothMap {
 public:
  using EvalFn = std::function<VecX(const VecX&)>;
  using JacobianFn = std::function<MatX(const VecX&)>;
  using SecondDerivativeFn = std::function<Tensor3(const VecX&)>;

  SmoothMap(int dim, EvalFn eval, JacobianFn jacobian, SecondDerivativeFn second_derivative);

  int dim() const { return dim_; }

  VecX value(const VecX& x) const;
  MatX jacobian(const VecX& x) const;
  Tensor3 second_derivative(const VecX& x) const;

  VecX operator()(const VecX& x) const { return value(x); }

 private:
  void check_point(const VecX& x) const;

  int dim_;
  EvalFn eval_;
  JacobianFn jacobian_;
  SecondDerivativeFn second_derivative_;
};

struct FdCheckResult {
  double jac_error;   // max-norm gap, analytic Jacobian vs central differences
  double hess_error;  // max-norm gap, analytic H vs second-order central differences
};

/// Validates the analytic derivatives against central finite differences of
/// eval with step h. A validator only; the solver never differentiates by FD.
FdCheckResult fd_check(const SmoothMap& map, const VecX& x, double h);

// ---------------------------------------------------------------------------
// Builtin corpus. All maps carry closed-form derivatives.

SmoothMap make_identity(int n);

/// f(x) = A x + b.
SmoothMap make_linear(MatX a, VecX b);

/// Default linear map: unit superdiagonal over the identity, top-left entry 2.
/// At n = 2 this is [[2,1],[0,1]].
SmoothMap make_linear_default(int n);

/// f_i(x) = x_i + alpha * sin(x_i), |alpha| < 1.
SmoothMap make_sinperturb(double alpha, int n);

/// f_i(x) = x_i + alpha * sin(x_{(i mod n)+1}) (1-based cyclic), |alpha| < 1.
SmoothMap make_cyclosin(double alpha, int n);

/// f(x1,x2) = (x1, x2 + x1^2): a global diffeomorphism whose inverse-Jacobian
/// norm is unbounded.
SmoothMap make_shear2();

/// f(x1,x2) = (e^{x1} cos x2, e^{x1} sin x2): the complex exponential in real
/// coordinates. Everywhere-invertible Jacobian, yet neither injective nor
/// surjective.
SmoothMap make_expc();

/// Resolves a CLI map name: identity | linear | sinperturb[:a] | cyclosin[:a]
/// | shear2 | expc. Throws DimensionMismatch for dimension constraints and
/// std::invalid_argument for unknown names / parameters out of range.
SmoothMap make_builtin(const std::string& id, int n);

}  // namespace hadinv
