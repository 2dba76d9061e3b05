#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/stats/distributions.hpp"
#include "bustt/stats/result.hpp"

namespace bustt::stats {

/// Lognormal parameters: ln(Y) ~ N(mu, sigma^2).
struct LognormalFit {
  double mu = 0.0;     // log-seconds
  double sigma = 0.0;  // log-seconds, > 0

  double cdf(double y) const {
    if (y <= 0.0) return 0.0;
    return normal_cdf((std::log(y) - mu) / sigma);
  }
  double median() const { return std::exp(mu); }
};

/// Fit by moments of the logs: mu = mean(ln y), sigma = sample (n-1)
/// standard deviation of ln y.
inline LognormalFit fit_lognormal(std::span<const double> sample) {
  if (sample.size() < 2) throw std::invalid_argument("fit_lognormal: need n >= 2");
  double s = 0.0;
  for (double v : sample) {
    if (v <= 0.0) throw DataError("fit_lognormal: lognormal requires positive data");
    s += std::log(v);
  }
  const double mu = s / static_cast<double>(sample.size());
  double ss = 0.0;
  for (double v : sample) {
    const double d = std::log(v) - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / static_cast<double>(sample.size() - 1));
  if (sigma <= 0.0) throw DataError("fit_lognormal: degenerate (constant sample)");
  return LognormalFit{mu, sigma};
}

/// One-sample Kolmogorov-Smirnov test against a *given* lognormal.
/// p-value from the asymptotic Kolmogorov distribution on sqrt(n)*D.
inline StatTestResult ks_lognormal(std::span<const double> sample,
                                   const LognormalFit& fit,
                                   double significance = 0.05) {
  const std::size_t n = sample.size();
  if (n < 20) throw std::invalid_argument("ks_lognormal: need n >= 20");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  double d_stat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sorted[i] <= 0.0) throw DataError("ks_lognormal: requires positive data");
    const double f = fit.cdf(sorted[i]);
    const double lo = static_cast<double>(i) / static_cast<double>(n);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
    d_stat = std::max({d_stat, hi - f, f - lo});
  }
  const double p = kolmogorov_q(std::sqrt(static_cast<double>(n)) * d_stat);
  return make_test_result(d_stat, p, significance, static_cast<int>(n));
}

/// K-S test of the lognormal hypothesis with parameters estimated from
/// the sample itself (the usage the reported p-values follow). With
/// estimated parameters the asymptotic p-value is conservative; the
/// known-parameter overload above is the calibrated variant.
inline StatTestResult ks_lognormal(std::span<const double> sample,
                                   double significance = 0.05) {
  return ks_lognormal(sample, fit_lognormal(sample), significance);
}

}  // namespace bustt::stats
