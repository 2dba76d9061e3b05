#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace bustt::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance (n-1 denominator).
inline double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double sample_stddev(std::span<const double> x) {
  return std::sqrt(sample_variance(x));
}

/// Geometric mean of positive values, computed in the log domain.
inline double geometric_mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("geometric_mean: empty sample");
  double s = 0.0;
  for (double v : x) {
    if (v <= 0.0) throw std::invalid_argument("geometric_mean: non-positive value");
    s += std::log(v);
  }
  return std::exp(s / static_cast<double>(x.size()));
}

/// Percentile by linear interpolation between order statistics
/// (rank h = (n-1)p, zero-based). p in [0, 1].
inline double percentile_linear(std::vector<double> x, double p) {
  if (x.empty()) throw std::invalid_argument("percentile_linear: empty sample");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("percentile_linear: p outside [0,1]");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

/// Pearson correlation coefficient.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson: length mismatch or n < 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw std::invalid_argument("pearson: zero-variance input");
  return sxy / std::sqrt(sxx * syy);
}

inline std::vector<double> first_difference(std::span<const double> x) {
  if (x.size() < 2) throw std::invalid_argument("first_difference: need n >= 2");
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
  return d;
}

}  // namespace bustt::stats
