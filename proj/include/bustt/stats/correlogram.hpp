#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "bustt/errors.hpp"

namespace bustt::stats {

/// Lag-indexed correlation values; values[0] is lag 0.
/// band is the +-1.96/sqrt(N) confidence half-width.
struct CorrelogramValues {
  std::vector<double> values;
  double band = 0.0;

  double at(int lag) const { return values.at(static_cast<std::size_t>(lag)); }
  int max_lag() const { return static_cast<int>(values.size()) - 1; }
  bool significant(int lag) const { return std::fabs(at(lag)) > band; }
};

/// Sample autocorrelation function,
///   rho(k) = sum_t (x_t - xbar)(x_{t+k} - xbar) / sum_t (x_t - xbar)^2.
/// The shared normalization keeps |rho(k)| <= 1 and the sequence
/// positive semidefinite, which Durbin-Levinson relies on.
inline CorrelogramValues acf(std::span<const double> x, int max_lag) {
  const auto n = static_cast<int>(x.size());
  if (max_lag < 0) throw std::invalid_argument("acf: negative max_lag");
  if (n <= max_lag) throw std::invalid_argument("acf: series shorter than max_lag");
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  if (c0 <= 0.0) throw DataError("acf: degenerate series (zero variance)");

  CorrelogramValues out;
  out.band = 1.96 / std::sqrt(static_cast<double>(n));
  out.values.resize(static_cast<std::size_t>(max_lag) + 1);
  out.values[0] = 1.0;
  for (int k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (int t = 0; t + k < n; ++t) ck += (x[t] - m) * (x[t + k] - m);
    out.values[static_cast<std::size_t>(k)] = ck / c0;
  }
  return out;
}

/// Partial autocorrelation via the Durbin-Levinson recursion on the
/// sample ACF. pacf(1) == acf(1) exactly.
inline CorrelogramValues pacf(std::span<const double> x, int max_lag) {
  const CorrelogramValues rho = acf(x, max_lag);
  CorrelogramValues out;
  out.band = rho.band;
  out.values.resize(rho.values.size());
  out.values[0] = 1.0;
  if (max_lag < 1) return out;

  std::vector<double> phi_prev(static_cast<std::size_t>(max_lag) + 1, 0.0);
  std::vector<double> phi_cur(static_cast<std::size_t>(max_lag) + 1, 0.0);
  phi_prev[1] = rho.values[1];
  out.values[1] = rho.values[1];

  for (int k = 2; k <= max_lag; ++k) {
    double num = rho.values[static_cast<std::size_t>(k)];
    double den = 1.0;
    for (int j = 1; j < k; ++j) {
      num -= phi_prev[static_cast<std::size_t>(j)] * rho.values[static_cast<std::size_t>(k - j)];
      den -= phi_prev[static_cast<std::size_t>(j)] * rho.values[static_cast<std::size_t>(j)];
    }
    const double phi_kk = std::fabs(den) > 1e-12 ? num / den : 0.0;
    phi_cur[static_cast<std::size_t>(k)] = phi_kk;
    for (int j = 1; j < k; ++j) {
      phi_cur[static_cast<std::size_t>(j)] =
          phi_prev[static_cast<std::size_t>(j)] - phi_kk * phi_prev[static_cast<std::size_t>(k - j)];
    }
    out.values[static_cast<std::size_t>(k)] = phi_kk;
    std::swap(phi_prev, phi_cur);
  }
  return out;
}

}  // namespace bustt::stats
