#pragma once

#include <cmath>

namespace hadinv {

/// Truncated second-order forward-mode number: value, two first-order parts
/// along independent seed directions, and the mixed second-order part.
/// Algebra: eps1^2 = eps2^2 = 0, eps1*eps2 != 0. Seeding direction j in d1 and
/// direction k in d2 makes d12 the exact mixed partial d2f/dx_j dx_k.
///
/// The cross terms below are written symmetrically (a single `a.d1*b.d2 +
/// a.d2*b.d1` sum) so swapping the two seed directions reproduces d12
/// bit-for-bit.
template <typename Scalar>
struct HyperDual {
  Scalar v{};    // value
  Scalar d1{};   // first-order part, seed direction 1
  Scalar d2{};   // first-order part, seed direction 2
  Scalar d12{};  // mixed second-order part

  HyperDual() = default;
  HyperDual(Scalar value) : v(value) {}  // NOLINT: implicit from scalar
  HyperDual(Scalar value, Scalar e1, Scalar e2, Scalar e12)
      : v(value), d1(e1), d2(e2), d12(e12) {}

  friend HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.d12 + b.d12};
  }
  friend HyperDual operator-(const HyperDual& a, const HyperDual& b) {
    return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2, a.d12 - b.d12};
  }
  friend HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }

  friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    const Scalar cross = a.d1 * b.d2 + a.d2 * b.d1;
    return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.v * b.d2 + a.d2 * b.v,
            a.v * b.d12 + cross + a.d12 * b.v};
  }

  friend HyperDual operator/(const HyperDual& a, const HyperDual& b) {
    const Scalar w = Scalar(1) / b.v;
    const Scalar w2 = w * w;
    // b^{-1} through the chain rule for x -> 1/x
    const HyperDual inv{w, -b.d1 * w2, -b.d2 * w2,
                        -b.d12 * w2 + Scalar(2) * (b.d1 * b.d2) * (w2 * w)};
    return a * inv;
  }
};

/// Lifts a univariate function through the truncated algebra given its value
/// and first two derivatives at a.v.
template <typename Scalar>
HyperDual<Scalar> lift(const HyperDual<Scalar>& a, Scalar f, Scalar df, Scalar d2f) {
  return {f, df * a.d1, df * a.d2, df * a.d12 + d2f * (a.d1 * a.d2)};
}

template <typename Scalar>
HyperDual<Scalar> sin(const HyperDual<Scalar>& a) {
  const Scalar s = std::sin(a.v), c = std::cos(a.v);
  return lift(a, s, c, -s);
}

template <typename Scalar>
HyperDual<Scalar> cos(const HyperDual<Scalar>& a) {
  const Scalar s = std::sin(a.v), c = std::cos(a.v);
  return lift(a, c, -s, -c);
}

template <typename Scalar>
HyperDual<Scalar> tan(const HyperDual<Scalar>& a) {
  const Scalar t = std::tan(a.v);
  const Scalar sec2 = Scalar(1) + t * t;
  return lift(a, t, sec2, Scalar(2) * t * sec2);
}

template <typename Scalar>
HyperDual<Scalar> exp(const HyperDual<Scalar>& a) {
  const Scalar e = std::exp(a.v);
  return lift(a, e, e, e);
}

template <typename Scalar>
HyperDual<Scalar> log(const HyperDual<Scalar>& a) {
  const Scalar w = Scalar(1) / a.v;
  return lift(a, std::log(a.v), w, -w * w);
}

template <typename Scalar>
HyperDual<Scalar> sqrt(const HyperDual<Scalar>& a) {
  const Scalar r = std::sqrt(a.v);
  const Scalar dr = Scalar(1) / (Scalar(2) * r);
  return lift(a, r, dr, -dr / (Scalar(2) * a.v));
}

template <typename Scalar>
HyperDual<Scalar> sinh(const HyperDual<Scalar>& a) {
  const Scalar s = std::sinh(a.v), c = std::cosh(a.v);
  return lift(a, s, c, s);
}

template <typename Scalar>
HyperDual<Scalar> cosh(const HyperDual<Scalar>& a) {
  const Scalar s = std::sinh(a.v), c = std::cosh(a.v);
  return lift(a, c, s, c);
}

template <typename Scalar>
HyperDual<Scalar> tanh(const HyperDual<Scalar>& a) {
  const Scalar t = std::tanh(a.v);
  const Scalar sech2 = Scalar(1) - t * t;
  return lift(a, t, sech2, Scalar(-2) * t * sech2);
}

template <typename Scalar>
HyperDual<Scalar> atan(const HyperDual<Scalar>& a) {
  const Scalar w = Scalar(1) / (Scalar(1) + a.v * a.v);
  return lift(a, std::atan(a.v), w, Scalar(-2) * a.v * w * w);
}

/// x^c for a constant (runtime) exponent via the chain rule. Integer c is
/// valid on the whole line; callers enforce domain rules beforehand. The
/// vanished-coefficient cases are short-circuited so 0 * pow(0, negative)
/// cannot produce NaN.
template <typename Scalar>
HyperDual<Scalar> pow_const(const HyperDual<Scalar>& a, Scalar c) {
  const Scalar f = std::pow(a.v, c);
  const Scalar df = c == Scalar(0) ? Scalar(0) : c * std::pow(a.v, c - Scalar(1));
  const Scalar d2f = (c == Scalar(0) || c == Scalar(1))
                         ? Scalar(0)
                         : c * (c - Scalar(1)) * std::pow(a.v, c - Scalar(2));
  return lift(a, f, df, d2f);
}

}  // namespace hadinv
