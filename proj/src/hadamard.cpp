#include <algorithm>
#include <cmath>
#include <limits>

#include "hadinv/linalg.hpp"
#include "hadinv/solver.hpp"

namespace hadinv {

namespace {

void validate_box(const SmoothMap& map, const Box& box) {
  if (static_cast<int>(box.size()) != map.dim())
    throw DimensionMismatch("box has " + std::to_string(box.size()) + " axes, map has dimension " +
                            std::to_string(map.dim()));
  for (const Interval& iv : box)
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("box axis [" + format_double(iv.lo) + ", " +
                                  format_double(iv.hi) + "] is degenerate");
}

double sigma_min_sq(const SmoothMap& map, const VecX& x) {
  const double s = sigma_min(map.jacobian(x));
  return s * s;
}

/// Golden-section minimization over [lo, hi]; returns argmin.
template <typename F>
double golden_section(F&& f, double lo, double hi, int iterations) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

HadamardEstimate estimate_hadamard(const SmoothMap& map, const Box& box, int n_grid,
                                   int n_random, bool refine, std::uint64_t rng_seed) {
  validate_box(map, box);
  if (n_grid < 2) throw std::invalid_argument("estimate_hadamard: need n_grid >= 2 per axis");
  if (n_random < 0) throw std::invalid_argument("estimate_hadamard: n_random must be >= 0");
  const int n = map.dim();

  HadamardEstimate est;
  est.box = box;
  est.refined = refine;

  double best = std::numeric_limits<double>::infinity();
  VecX best_x = VecX::Zero(n);

  auto consider = [&](const VecX& x) {
    const double v = sigma_min_sq(map, x);
    ++est.samples;
    if (v < best) {
      best = v;
      best_x = x;
    }
  };

  // Regular grid, row-major (last axis fastest); ties keep the earliest point.
  if (n * std::log10(static_cast<double>(n_grid)) > 8.0)
    throw std::invalid_argument(
        "estimate_hadamard: grid of " + std::to_string(n_grid) + "^" + std::to_string(n) +
        " points exceeds the 1e8 budget; lower --grid or use random sampling");
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= n_grid;
  VecX x(n);
  for (std::int64_t flat = 0; flat < total; ++flat) {
    std::int64_t rem = flat;
    for (int axis = n - 1; axis >= 0; --axis) {
      const int idx = static_cast<int>(rem % n_grid);
      rem /= n_grid;
      x[axis] = box[axis].lo + (box[axis].hi - box[axis].lo) *
                                   (static_cast<double>(idx) / (n_grid - 1));
    }
    consider(x);
  }

  SplitMix64 rng(rng_seed);
  for (int k = 0; k < n_random; ++k) {
    for (int axis = 0; axis < n; ++axis) x[axis] = rng.uniform(box[axis].lo, box[axis].hi);
    consider(x);
  }

  if (refine) {
    // Coordinate descent around the incumbent, restricted to one grid cell
    // per side and keep-best.
    VecX current = best_x;
    double current_val = best;
    for (int sweep = 0; sweep < 50; ++sweep) {
      const double before = current_val;
      for (int axis = 0; axis < n; ++axis) {
        const double cell = (box[axis].hi - box[axis].lo) / (n_grid - 1);
        const double lo = std::max(box[axis].lo, current[axis] - cell);
        const double hi = std::min(box[axis].hi, current[axis] + cell);
        auto line = [&](double v) {
          VecX probe = current;
          probe[axis] = v;
          return sigma_min_sq(map, probe);
        };
        const double candidate = golden_section(line, lo, hi, 50);
        const double cval = line(candidate);
        if (cval < current_val) {
          current[axis] = candidate;
          current_val = cval;
        }
      }
      if (!(current_val < before - 1e-18 * (1.0 + std::abs(before)))) break;
    }
    if (current_val < best) {
      best = current_val;
      best_x = current;
    }
  }

  est.argmin = best_x;
  est.c_hat = sigma_min_sq(map, best_x);
  return est;
}

LipschitzProbeReport lipschitz_probe(const SmoothMap& map, double c_hat, int n_pairs,
                                     const Box& box, std::uint64_t rng_seed,
                                     const std::vector<std::pair<VecX, VecX>>& extra_pairs) {
  validate_box(map, box);
  if (!(c_hat >= 0.0)) throw std::invalid_argument("lipschitz_probe: c_hat must be >= 0");
  const int n = map.dim();
  const double sqrt_c = std::sqrt(c_hat);

  LipschitzProbeReport report;
  auto check = [&](const VecX& x, const VecX& y) {
    ++report.pairs_checked;
    const double image_distance = (map.value(x) - map.value(y)).norm();
    const double bound = sqrt_c * (x - y).norm();
    if (image_distance < bound * (1.0 - 1e-9))
      report.violations.push_back(LipschitzViolation{x, y, image_distance, bound});
  };

  for (const auto& [x, y] : extra_pairs) check(x, y);

  SplitMix64 rng(rng_seed);
  VecX x(n), y(n);
  for (int k = 0; k < n_pairs; ++k) {
    for (int axis = 0; axis < n; ++axis) x[axis] = rng.uniform(box[axis].lo, box[axis].hi);
    for (int axis = 0; axis < n; ++axis) y[axis] = rng.uniform(box[axis].lo, box[axis].hi);
    check(x, y);
  }
  return report;
}

}  // namespace hadinv
