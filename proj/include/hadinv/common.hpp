#pragma once

#include <Eigen/Core>

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hadinv {

using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Rank-3 tensor of second derivatives: tensor[a](i, j) = d2 f_a / dx_i dx_j.
/// Each slice is symmetric.
using Tensor3 = std::vector<MatX>;

// ---------------------------------------------------------------------------
// Errors

enum class FailureKind {
  PathDiverged,
  SingularJacobian,
  MaxStepsExceeded,
  ToleranceNotMet,
};

std::string failure_kind_name(FailureKind kind);

/// Base for numeric failures that may carry the location (time along a path
/// and the state reached) where the computation broke down.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}

  std::optional<double> t;
  VecX state;  // empty when unknown

  void set_location(double t_at, const VecX& state_at) {
    if (!t) {
      t = t_at;
      state = state_at;
    }
  }
};

class SingularJacobian : public NumericError {
 public:
  using NumericError::NumericError;
};

class PathDiverged : public NumericError {
 public:
  using NumericError::NumericError;
};

class MaxStepsExceeded : public NumericError {
 public:
  using NumericError::NumericError;
};

class ToleranceNotMet : public NumericError {
 public:
  using NumericError::NumericError;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation outside the domain of a partial function (log, sqrt, division),
/// reported eagerly with the offending point instead of letting NaN propagate.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, VecX at)
      : std::runtime_error(what + " at point " + format_point(at)), point(std::move(at)) {}

  VecX point;

 private:
  static std::string format_point(const VecX& p);
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("parse error at line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ": " + message),
        line(line),
        column(column) {}

  int line;
  int column;
};

// ---------------------------------------------------------------------------
// Deterministic random stream

/// splitmix64 stream; every randomized operation takes an explicit seed so
/// runs are bit-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  VecX uniform_vector(int n, double lo, double hi) {
    VecX v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Formatting

/// Shortest decimal form that parses back to the same double. Used everywhere
/// text output must be byte-reproducible.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::string DomainError::format_point(const VecX& p) {
  std::string out = "(";
  for (int i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += format_double(p[i]);
  }
  return out + ")";
}

}  // namespace hadinv
