#pragma once

#include <Eigen/Dense>

#include "hadinv/common.hpp"

namespace hadinv {

inline constexpr double kSingularRcond = 1e-12;

namespace detail {

inline void require_square(const MatX& a) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DimensionMismatch("matrix must be square, got " + std::to_string(a.rows()) +
                            "x" + std::to_string(a.cols()));
}

/// LU with the shared singularity policy: reciprocal condition estimate below
/// kSingularRcond (or not finite) raises SingularJacobian.
inline Eigen::PartialPivLU<MatX> checked_lu(const MatX& a) {
  require_square(a);
  Eigen::PartialPivLU<MatX> lu(a);
  const double rc = lu.rcond();
  if (!(rc >= kSingularRcond))
    throw SingularJacobian("matrix numerically singular (rcond estimate " +
                           format_double(rc) + ")");
  return lu;
}

}  // namespace detail

/// Solves A x = b by row-pivoted LU. Raises SingularJacobian when the
/// reciprocal condition estimate drops below 1e-12.
template <typename DerivedA, typename DerivedB>
VecX solve_linear(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  const MatX am = a;
  if (am.rows() != b.size())
    throw DimensionMismatch("solve_linear: A is " + std::to_string(am.rows()) + "x" +
                            std::to_string(am.cols()) + " but b has length " +
                            std::to_string(b.size()));
  return detail::checked_lu(am).solve(b.eval());
}

/// Smallest singular value. Zero is a valid result for singular input.
template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& a) {
  const MatX am = a;
  detail::require_square(am);
  Eigen::JacobiSVD<MatX> svd(am);
  return svd.singularValues()(am.rows() - 1);
}

}  // namespace hadinv
