#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bustt/stats/result.hpp"

namespace bustt::stats {

/// Schwert's thumb rule for the maximum ADF lag: floor(12 * (N/100)^(1/4)).
inline int schwert_max_lag(int n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

namespace detail {

// Asymptotic quantiles of the Dickey-Fuller t distribution, constant
// term, no deterministic trend (Fuller 1976, Table 8.5.2, n = inf).
inline constexpr double kAdfProbs[] = {0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99};
inline constexpr double kAdfQuantiles[] = {-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60};
inline constexpr int kAdfTableSize = 8;

// Approximate p-value by monotone piecewise-linear interpolation of the
// quantile table. Exact at the tabulated significance levels; mid-range
// values are interpolation only.
inline double adf_approx_p(double stat) {
  if (stat <= kAdfQuantiles[0]) {
    const double slope = (kAdfProbs[1] - kAdfProbs[0]) / (kAdfQuantiles[1] - kAdfQuantiles[0]);
    return std::clamp(kAdfProbs[0] + slope * (stat - kAdfQuantiles[0]), 1e-4, 1.0);
  }
  if (stat >= kAdfQuantiles[kAdfTableSize - 1]) {
    const double slope = (kAdfProbs[kAdfTableSize - 1] - kAdfProbs[kAdfTableSize - 2]) /
                         (kAdfQuantiles[kAdfTableSize - 1] - kAdfQuantiles[kAdfTableSize - 2]);
    return std::clamp(kAdfProbs[kAdfTableSize - 1] +
                          slope * (stat - kAdfQuantiles[kAdfTableSize - 1]),
                      0.0, 1.0 - 1e-4);
  }
  for (int i = 1; i < kAdfTableSize; ++i) {
    if (stat <= kAdfQuantiles[i]) {
      const double f = (stat - kAdfQuantiles[i - 1]) / (kAdfQuantiles[i] - kAdfQuantiles[i - 1]);
      return kAdfProbs[i - 1] + f * (kAdfProbs[i] - kAdfProbs[i - 1]);
    }
  }
  return 0.5;
}

struct AdfFit {
  double gamma = 0.0;
  double se_gamma = 0.0;
  double rss = 0.0;
  int rows = 0;
};

// Fit dx_t = alpha + gamma * x_{t-1} + sum_{i=1..lag} beta_i dx_{t-i} + e
// over levels index t in [start, n). start must be >= lag + 1.
inline AdfFit adf_regression(std::span<const double> x, int lag, int start) {
  const int n = static_cast<int>(x.size());
  const int rows = n - start;
  const int cols = lag + 2;  // x_{t-1}, lagged diffs, intercept
  Eigen::MatrixXd X(rows, cols);
  Eigen::VectorXd y(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = start + r;
    y(r) = x[t] - x[t - 1];
    X(r, 0) = x[t - 1];
    for (int i = 1; i <= lag; ++i) X(r, i) = x[t - i] - x[t - i - 1];
    X(r, cols - 1) = 1.0;
  }
  const Eigen::MatrixXd xtx = X.transpose() * X;
  const Eigen::VectorXd beta = xtx.ldlt().solve(X.transpose() * y);
  const Eigen::VectorXd resid = y - X * beta;
  AdfFit f;
  f.gamma = beta(0);
  f.rss = resid.squaredNorm();
  f.rows = rows;
  const double sigma2 = f.rss / static_cast<double>(rows - cols);
  const Eigen::MatrixXd xtx_inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
  f.se_gamma = std::sqrt(std::max(0.0, sigma2 * xtx_inv(0, 0)));
  return f;
}

}  // namespace detail

/// Augmented Dickey-Fuller unit-root test, constant term, no trend.
///
/// Lag length: candidates 0..schwert_max_lag(N) are fitted on a common
/// sample and the BIC-minimizing lag is refitted on its full sample.
/// The statistic is the t-ratio of the level coefficient; reject_null
/// means the unit-root hypothesis is rejected (series stationary).
/// meta carries the chosen lag.
inline StatTestResult adf(std::span<const double> series, double significance = 0.05) {
  const int n = static_cast<int>(series.size());
  if (n < 30) throw std::invalid_argument("adf: need N >= 30");
  int max_lag = schwert_max_lag(n);
  // keep the common-sample regression overdetermined
  max_lag = std::min(max_lag, (n - 6) / 2);

  const int common_start = max_lag + 1;
  double best_bic = std::numeric_limits<double>::infinity();
  int best_lag = 0;
  for (int lag = 0; lag <= max_lag; ++lag) {
    const auto f = detail::adf_regression(series, lag, common_start);
    const double m = static_cast<double>(f.rows);
    const double bic = m * std::log(f.rss / m) + static_cast<double>(lag + 2) * std::log(m);
    if (bic < best_bic) {
      best_bic = bic;
      best_lag = lag;
    }
  }
  const auto fit = detail::adf_regression(series, best_lag, best_lag + 1);
  const double stat = fit.se_gamma > 0.0 ? fit.gamma / fit.se_gamma : 0.0;
  const double p = detail::adf_approx_p(stat);
  return make_test_result(stat, p, significance, best_lag);
}

}  // namespace bustt::stats
