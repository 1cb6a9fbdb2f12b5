#include <cmath>

#include "hadinv/linalg.hpp"
#include "hadinv/smooth_map.hpp"

namespace hadinv {

namespace {

Tensor3 zero_tensor(int n) {
  return Tensor3(n, MatX::Zero(n, n));
}

void require_alpha(double alpha) {
  if (!(std::abs(alpha) < 1.0))
    throw std::invalid_argument("perturbation strength must satisfy |alpha| < 1, got " +
                                format_double(alpha));
}

}  // namespace

SmoothMap make_identity(int n) {
  return SmoothMap(
      n, [](const VecX& x) { return x; },
      [n](const VecX&) { return MatX::Identity(n, n).eval(); },
      [n](const VecX&) { return zero_tensor(n); });
}

SmoothMap make_linear(MatX a, VecX b) {
  const int n = static_cast<int>(a.rows());
  if (a.rows() != a.cols() || b.size() != n)
    throw DimensionMismatch("make_linear: A must be square and match b");
  // reject non-invertible A up front
  detail::checked_lu(a);
  return SmoothMap(
      n, [a, b](const VecX& x) { return (a * x + b).eval(); },
      [a](const VecX&) { return a; },
      [n](const VecX&) { return zero_tensor(n); });
}

SmoothMap make_linear_default(int n) {
  MatX a = MatX::Identity(n, n);
  a(0, 0) = 2.0;
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  return make_linear(std::move(a), VecX::Zero(n));
}

SmoothMap make_sinperturb(double alpha, int n) {
  require_alpha(alpha);
  return SmoothMap(
      n,
      [alpha](const VecX& x) {
        return (x.array() + alpha * x.array().sin()).matrix().eval();
      },
      [alpha, n](const VecX& x) {
        MatX j = MatX::Identity(n, n);
        for (int i = 0; i < n; ++i) j(i, i) += alpha * std::cos(x[i]);
        return j;
      },
      [alpha, n](const VecX& x) {
        Tensor3 h = zero_tensor(n);
        for (int a = 0; a < n; ++a) h[a](a, a) = -alpha * std::sin(x[a]);
        return h;
      });
}

SmoothMap make_cyclosin(double alpha, int n) {
  require_alpha(alpha);
  // component i (0-based) reads coordinate (i+1) mod n
  return SmoothMap(
      n,
      [alpha, n](const VecX& x) {
        VecX f(n);
        for (int i = 0; i < n; ++i) f[i] = x[i] + alpha * std::sin(x[(i + 1) % n]);
        return f;
      },
      [alpha, n](const VecX& x) {
        MatX j = MatX::Identity(n, n);
        for (int i = 0; i < n; ++i) j(i, (i + 1) % n) += alpha * std::cos(x[(i + 1) % n]);
        return j;
      },
      [alpha, n](const VecX& x) {
        Tensor3 h = zero_tensor(n);
        for (int a = 0; a < n; ++a) {
          const int k = (a + 1) % n;
          h[a](k, k) += -alpha * std::sin(x[k]);
        }
        return h;
      });
}

SmoothMap make_shear2() {
  return SmoothMap(
      2,
      [](const VecX& x) {
        VecX f(2);
        f << x[0], x[1] + x[0] * x[0];
        return f;
      },
      [](const VecX& x) {
        MatX j(2, 2);
        j << 1.0, 0.0, 2.0 * x[0], 1.0;
        return j;
      },
      [](const VecX&) {
        Tensor3 h = zero_tensor(2);
        h[1](0, 0) = 2.0;
        return h;
      });
}

SmoothMap make_expc() {
  return SmoothMap(
      2,
      [](const VecX& x) {
        const double r = std::exp(x[0]);
        VecX f(2);
        f << r * std::cos(x[1]), r * std::sin(x[1]);
        return f;
      },
      [](const VecX& x) {
        const double r = std::exp(x[0]);
        const double c = std::cos(x[1]), s = std::sin(x[1]);
        MatX j(2, 2);
        j << r * c, -r * s, r * s, r * c;
        return j;
      },
      [](const VecX& x) {
        const double r = std::exp(x[0]);
        const double c = std::cos(x[1]), s = std::sin(x[1]);
        Tensor3 h = zero_tensor(2);
        h[0] << r * c, -r * s, -r * s, -r * c;
        h[1] << r * s, r * c, r * c, -r * s;
        return h;
      });
}

SmoothMap make_builtin(const std::string& id, int n) {
  std::string name = id;
  std::optional<double> param;
  if (auto colon = id.find(':'); colon != std::string::npos) {
    name = id.substr(0, colon);
    const std::string tail = id.substr(colon + 1);
    try {
      std::size_t used = 0;
      param = std::stod(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad map parameter '" + tail + "' in '" + id + "'");
    }
  }

  auto require_dim = [&](int want) {
    if (n != want)
      throw DimensionMismatch("map '" + name + "' requires dimension " + std::to_string(want) +
                              ", got " + std::to_string(n));
  };
  if (n < 1) throw DimensionMismatch("map dimension must be >= 1");

  if (name == "identity") return make_identity(n);
  if (name == "linear") return make_linear_default(n);
  if (name == "sinperturb") return make_sinperturb(param.value_or(0.5), n);
  if (name == "cyclosin") return make_cyclosin(param.value_or(0.4), n);
  if (name == "shear2") {
    require_dim(2);
    return make_shear2();
  }
  if (name == "expc") {
    require_dim(2);
    return make_expc();
  }
  throw std::invalid_argument("unknown builtin map '" + name + "'");
}

}  // namespace hadinv
