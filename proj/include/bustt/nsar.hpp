#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/sar.hpp"
#include "bustt/stats/descriptive.hpp"
#include "bustt/stats/linreg.hpp"
#include "bustt/stats/partial_corr.hpp"

namespace bustt::nsar {

using sar::Domain;

/// Per-bin regression: order k, weight vector [w0 (intercept), w1..wk],
/// and the one-step noise variance.
struct NsarBin {
  int k = 0;
  std::vector<double> weights;
  double noise_variance = 0.0;
};

/// Non-stationary AR model: one regression per time bin. Bin 1 carries
/// the unconditional fallback (k = 0, w0 = training mean).
struct NsarModel {
  int section = 0;
  Domain domain = Domain::Log;
  int bins = 0;
  std::vector<NsarBin> per_bin;  // index b-1 holds bin b

  /// Unconditional bin means implied by the fitted recursion,
  /// m_b = w0^b + sum_i w_i^b m_{b-i}. Used to impute missing
  /// conditioning bins at query time.
  std::vector<double> implied_bin_means() const {
    std::vector<double> m(static_cast<std::size_t>(bins), 0.0);
    for (int b = 1; b <= bins; ++b) {
      const auto& nb = per_bin[static_cast<std::size_t>(b - 1)];
      double v = nb.weights[0];
      for (int i = 1; i <= nb.k; ++i)
        v += nb.weights[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(b - i - 1)];
      m[static_cast<std::size_t>(b - 1)] = v;
    }
    return m;
  }
};

/// d days x B bins of model-domain values for one section; rows are the
/// i.i.d. day realizations the learner consumes.
struct TrainingMatrix {
  int days = 0;
  int bins = 0;
  std::vector<double> values;  // day-major

  double cell(int day, int bin) const {
    return values[static_cast<std::size_t>(day) * bins + (bin - 1)];
  }
  std::vector<double> column(int bin) const {
    std::vector<double> col(static_cast<std::size_t>(days));
    for (int day = 0; day < days; ++day) col[static_cast<std::size_t>(day)] = cell(day, bin);
    return col;
  }

  static TrainingMatrix from_series(const ingest::SectionSeries& s, Domain domain,
                                    int day_limit = -1) {
    TrainingMatrix m;
    m.days = day_limit > 0 ? std::min(day_limit, s.days) : s.days;
    m.bins = s.bins;
    m.values.reserve(static_cast<std::size_t>(m.days) * m.bins);
    for (int day = 0; day < m.days; ++day) {
      for (int bin = 1; bin <= m.bins; ++bin) {
        const double v = s.cell(day, bin);
        m.values.push_back(domain == Domain::Log ? std::log(v) : v);
      }
    }
    return m;
  }
};

struct LearnOptions {
  double significance = 0.05;
  stats::PcTstat pc_variant = stats::PcTstat::Paper;
  int min_days = 10;
};

/// Per-bin order and weights, exactly the published loop: for win from
/// n-1 down to 2, regress X_n and X_{win-1} on (X_{n-1}..X_{win}), test
/// the residual correlation; the first retained null fixes
/// k(n) = n - win. If no null is retained, X_n regresses on the whole
/// feasible past. Degenerate residuals count as a retained null.
inline NsarBin learn_bin(const TrainingMatrix& data, int n, const LearnOptions& opt = {}) {
  const int d = data.days;
  if (n < 2 || n > data.bins) throw std::invalid_argument("learn_bin: bin out of range (need 2..B)");
  if (d < 4) throw std::invalid_argument("learn_bin: too few days");
  const auto dep = data.column(n);

  std::vector<std::vector<double>> block;  // X_{n-1}, X_{n-2}, ...
  for (int win = n - 1; win >= 2; --win) {
    const int m = n - win;
    if (d <= m + 2) break;  // this and all narrower windows are infeasible
    block.push_back(data.column(win));  // block now holds X_{n-1}..X_{win}
    const auto pc = stats::partial_corr(dep, data.column(win - 1), block);
    const bool independent =
        pc.degenerate ||
        !stats::pc_t_test(pc.pc, d, opt.significance, opt.pc_variant).reject_null;
    if (independent) {
      NsarBin bin;
      bin.k = m;
      bin.weights = pc.forward_weights;
      bin.noise_variance = stats::sample_variance(pc.forward_residuals);
      return bin;
    }
  }

  // dependent on the entire (feasible) past
  const int m = std::min(n - 1, d - 3);
  std::vector<std::vector<double>> full;
  for (int j = 1; j <= m; ++j) full.push_back(data.column(n - j));
  const auto fit = stats::linreg(full, dep, true);
  NsarBin bin;
  bin.k = m;
  bin.weights.reserve(static_cast<std::size_t>(m) + 1);
  bin.weights.push_back(fit.intercept);
  bin.weights.insert(bin.weights.end(), fit.weights.begin(), fit.weights.end());
  bin.noise_variance = stats::sample_variance(fit.residuals);
  return bin;
}

/// Learn every bin: bins 2..B through learn_bin, bin 1 as the
/// unconditional training mean and variance.
inline NsarModel learn_all(const TrainingMatrix& data, const LearnOptions& opt = {}) {
  if (data.days < opt.min_days)
    throw DataError("nsar: need at least " + std::to_string(opt.min_days) +
                    " training days, got " + std::to_string(data.days));
  if (data.bins < 2) throw std::invalid_argument("nsar: need at least 2 bins");
  NsarModel model;
  model.bins = data.bins;
  model.per_bin.resize(static_cast<std::size_t>(data.bins));

  const auto first = data.column(1);
  model.per_bin[0].k = 0;
  model.per_bin[0].weights = {stats::mean(first)};
  model.per_bin[0].noise_variance = stats::sample_variance(first);

  for (int n = 2; n <= data.bins; ++n) {
    model.per_bin[static_cast<std::size_t>(n - 1)] = learn_bin(data, n, opt);
  }
  return model;
}

/// Iterated plug-in prediction of `target_bin` from the same-day values
/// for bins 1..t (t = same_day.size()); intermediate bins are predicted
/// and fed back in order.
inline double forecast(const NsarModel& model, std::span<const double> same_day,
                       int target_bin) {
  const int t = static_cast<int>(same_day.size());
  if (target_bin <= t) throw std::invalid_argument("nsar forecast: target not in future");
  if (target_bin > model.bins)
    throw std::invalid_argument("nsar forecast: target bin " + std::to_string(target_bin) +
                                " beyond model (B = " + std::to_string(model.bins) + ")");
  std::vector<double> vals(same_day.begin(), same_day.end());
  vals.reserve(static_cast<std::size_t>(target_bin));
  for (int b = t + 1; b <= target_bin; ++b) {
    const auto& nb = model.per_bin[static_cast<std::size_t>(b - 1)];
    double x = nb.weights[0];
    for (int i = 1; i <= nb.k; ++i)
      x += nb.weights[static_cast<std::size_t>(i)] * vals[static_cast<std::size_t>(b - i - 1)];
    vals.push_back(x);
  }
  return vals.back();
}

enum class PointEstimate { Median, Mean };

/// Travel-time prediction in seconds. Log domain: exponentiating the
/// Gaussian-domain prediction gives the conditional median; Mean adds
/// the sigma^2/2 correction (exact for one-step predictions).
inline double predict_travel_time(const NsarModel& model,
                                  std::span<const double> same_day_seconds, int target_bin,
                                  PointEstimate estimate = PointEstimate::Median) {
  if (model.domain == Domain::Log) {
    std::vector<double> logs(same_day_seconds.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
      if (same_day_seconds[i] <= 0.0)
        throw DataError("nsar predict_travel_time: observations must be positive");
      logs[i] = std::log(same_day_seconds[i]);
    }
    const double xhat = forecast(model, logs, target_bin);
    if (estimate == PointEstimate::Mean) {
      const double s2 = model.per_bin[static_cast<std::size_t>(target_bin - 1)].noise_variance;
      return std::exp(xhat + 0.5 * s2);
    }
    return std::exp(xhat);
  }
  return std::max(forecast(model, same_day_seconds, target_bin), 1e-9);
}

}  // namespace bustt::nsar
