// Test-only reference computations, kept independent of the library paths
// they validate.
#pragma once

#include <cmath>
#include <stdexcept>

#include "hadinv/common.hpp"
#include "hadinv/expr.hpp"

namespace oracles {

using hadinv::MatX;
using hadinv::SplitMix64;
using hadinv::VecX;

// Random expression trees with nonnegative literals (negation stays an
// explicit node, mirroring what the parser builds).
inline hadinv::ExprPtr random_expr(SplitMix64& rng, int n_vars, int depth) {
  using hadinv::BinaryOp;
  using hadinv::ExprNode;
  using hadinv::UnaryOp;
  const double pick = rng.next_double();
  if (depth <= 0 || pick < 0.3) {
    if (rng.next_double() < 0.5) return ExprNode::make_constant(rng.uniform(0.0, 3.0));
    return ExprNode::make_variable(1 + static_cast<int>(rng.next_u64() % n_vars));
  }
  if (pick < 0.6) {
    static const UnaryOp ops[] = {UnaryOp::Neg,  UnaryOp::Sin,  UnaryOp::Cos,  UnaryOp::Tan,
                                  UnaryOp::Exp,  UnaryOp::Log,  UnaryOp::Sqrt, UnaryOp::Tanh,
                                  UnaryOp::Sinh, UnaryOp::Cosh, UnaryOp::Atan};
    return ExprNode::make_unary(ops[rng.next_u64() % 11], random_expr(rng, n_vars, depth - 1));
  }
  static const BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                                 BinaryOp::Pow};
  const BinaryOp op = ops[rng.next_u64() % 5];
  if (op == BinaryOp::Pow)
    return ExprNode::make_binary(
        BinaryOp::Pow, random_expr(rng, n_vars, depth - 1),
        ExprNode::make_constant(static_cast<double>(rng.next_u64() % 4)));
  return ExprNode::make_binary(op, random_expr(rng, n_vars, depth - 1),
                               random_expr(rng, n_vars, depth - 1));
}

inline hadinv::MapAst random_ast(SplitMix64& rng, int n, int depth) {
  hadinv::MapAst ast;
  ast.dim = n;
  for (int i = 0; i < n; ++i) ast.components.push_back(random_expr(rng, n, depth));
  return ast;
}

/// Max relative gap between the analytic Jacobian and central differences at
/// step 1e-6. Returns nullopt when the stencil itself cannot be trusted at x
/// (large values, or differences that have not converged in h), in which case
/// the caller should resample. DomainError propagates.
inline std::optional<double> fd_jacobian_gap(const hadinv::SmoothMap& map, const VecX& x) {
  const int n = map.dim();
  if (map.value(x).cwiseAbs().maxCoeff() > 100.0) return std::nullopt;
  const MatX jac = map.jacobian(x);
  if (jac.cwiseAbs().maxCoeff() > 1e4) return std::nullopt;

  double gap = 0.0;
  for (int j = 0; j < n; ++j) {
    VecX fd_h[2];
    const double steps[2] = {1e-6, 1e-5};
    for (int s = 0; s < 2; ++s) {
      VecX xp = x, xm = x;
      xp[j] += steps[s];
      xm[j] -= steps[s];
      fd_h[s] = (map.value(xp) - map.value(xm)) / (2.0 * steps[s]);
    }
    // the two step sizes must already agree, otherwise the oracle is noise
    if ((fd_h[0] - fd_h[1]).cwiseAbs().maxCoeff() >
        1e-7 * (1.0 + fd_h[0].cwiseAbs().maxCoeff()))
      return std::nullopt;
    for (int a = 0; a < n; ++a)
      gap = std::max(gap, std::abs(fd_h[0][a] - jac(a, j)) / (1.0 + std::abs(jac(a, j))));
  }
  return gap;
}

inline MatX random_matrix(SplitMix64& rng, int n, double lo = -2.0, double hi = 2.0) {
  MatX m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

// Gram-Schmidt orthogonalization of a random matrix (no library
// decompositions involved).
inline MatX random_orthogonal(SplitMix64& rng, int n) {
  MatX q = random_matrix(rng, n, -1.0, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    const double nrm = q.col(j).norm();
    if (nrm < 1e-8) {
      q.col(j).setZero();
      q(j, j) = 1.0;
      for (int k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
      q.col(j).normalize();
    } else {
      q.col(j) /= nrm;
    }
  }
  return q;
}

/// Number of pivots of the symmetric matrix s - lambda*I that are negative,
/// by symmetric Gaussian elimination. Equals the number of eigenvalues below
/// lambda.
inline int eigs_below(MatX s, double lambda, int n) {
  for (int i = 0; i < n; ++i) s(i, i) -= lambda;
  int count = 0;
  for (int k = 0; k < n; ++k) {
    double pivot = s(k, k);
    if (pivot == 0.0) pivot = -1e-300;  // grazing hit counts as crossed
    if (pivot < 0.0) ++count;
    for (int i = k + 1; i < n; ++i) {
      const double factor = s(i, k) / pivot;
      for (int j = k; j < n; ++j) s(i, j) -= factor * s(k, j);
    }
  }
  return count;
}

/// Smallest singular value as sqrt of the smallest eigenvalue of A^T A,
/// located by bisection on the eigenvalue-counting function (the sign
/// structure of the characteristic polynomial).
inline double sigma_min_bisection(const MatX& a) {
  const int n = static_cast<int>(a.rows());
  const MatX s = a.transpose() * a;
  double hi = 0.0;
  for (int i = 0; i < n; ++i) hi = std::max(hi, s(i, i));
  hi = hi * (1.0 + 1e-12) + 1e-300;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eigs_below(s, mid, n) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return std::sqrt(0.5 * (lo + hi));
}

/// Operator norm of A^{-1} by power iteration on B = A^{-T} A^{-1}, with the
/// solves done by plain Gaussian elimination with partial pivoting written
/// out here.
inline VecX gauss_solve(MatX a, VecX b) {
  const int n = static_cast<int>(a.rows());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw std::runtime_error("oracle solve: singular");
    if (piv != k) {
      a.row(piv).swap(a.row(k));
      std::swap(b[piv], b[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  VecX x(n);
  for (int i = n - 1; i >= 0; --i) {
    double acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

inline double inverse_opnorm_power_iteration(const MatX& a, SplitMix64& rng,
                                             int iterations = 3000) {
  const int n = static_cast<int>(a.rows());
  VecX v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform(-1.0, 1.0);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    // w = A^{-T} A^{-1} v
    const VecX w = gauss_solve(a.transpose(), gauss_solve(a, v));
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

/// Matrix exponential by scaling and squaring with a long Taylor series.
inline MatX expm(const MatX& a) {
  const int n = static_cast<int>(a.rows());
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.25) {
    scale *= 0.5;
    ++squarings;
  }
  const MatX as = a * scale;
  MatX term = MatX::Identity(n, n);
  MatX sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * as) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace oracles
