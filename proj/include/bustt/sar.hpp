#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "bustt/errors.hpp"
#include "bustt/stats/adf.hpp"
#include "bustt/stats/correlogram.hpp"
#include "bustt/stats/descriptive.hpp"
#include "bustt/stats/linreg.hpp"
#include "bustt/stats/result.hpp"

namespace bustt::sar {

enum class Domain { Log, Linear };
enum class SarKind { Additive, Multiplicative };

inline const char* to_string(Domain d) { return d == Domain::Log ? "log" : "linear"; }
inline const char* to_string(SarKind k) {
  return k == SarKind::Additive ? "additive" : "multiplicative";
}

/// Seasonal AR fit for one section.
///
/// Multiplicative: (1 - sum phi_i L^i)(1 - Phi L^s) y = c + e, coeffs
/// stores [phi_1..phi_p, Phi]. Additive: AR(s) with only lags 1..p and
/// lag s free, coeffs stores the full length-s lag vector with the
/// zero-constrained pattern in place. Coefficients describe the
/// (possibly differenced) series the model was fitted on.
struct SarModel {
  int section = 0;
  Domain domain = Domain::Log;
  bool differenced = false;
  SarKind kind = SarKind::Additive;
  int p = 1;
  int seasonal_order = 1;  // P, fixed at one seasonal lag
  int season = 19;         // s
  std::vector<double> coeffs;
  double intercept = 0.0;
  double noise_variance = 0.0;
  double aic = 0.0;
  double train_mean = 0.0;  // level mean of the training series (pre-differencing)

  int max_lag() const { return kind == SarKind::Multiplicative ? p + season : season; }
};

// AR stationarity: companion-matrix eigenvalues of x_t = sum a_i x_{t-i}
// must lie strictly inside the unit circle.
inline bool ar_stationary(std::span<const double> lag_coeffs) {
  const int k = static_cast<int>(lag_coeffs.size());
  if (k == 0) return true;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) companion(0, j) = lag_coeffs[static_cast<std::size_t>(j)];
  for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
  const auto eigs = companion.eigenvalues();
  for (int i = 0; i < k; ++i) {
    if (std::abs(eigs(i)) >= 1.0) return false;
  }
  return true;
}

namespace detail {

inline void check_fit_stationary(const SarModel& m) {
  bool ok;
  if (m.kind == SarKind::Multiplicative) {
    ok = ar_stationary(std::span<const double>(m.coeffs.data(), static_cast<std::size_t>(m.p))) &&
         std::fabs(m.coeffs[static_cast<std::size_t>(m.p)]) < 1.0;
  } else {
    ok = ar_stationary(m.coeffs);
  }
  if (!ok) {
    throw DataError(std::string("sar: fitted ") + to_string(m.kind) +
                    " model has roots on or inside the unit circle");
  }
}

inline double sar_aic(double rss, int n_eff, int p) {
  const double sigma2 = std::max(rss / static_cast<double>(n_eff), 1e-300);
  return static_cast<double>(n_eff) * std::log(sigma2) + 2.0 * (static_cast<double>(p) + 2.0);
}

}  // namespace detail

struct ScreenResult {
  std::vector<double> series;  // original or first-differenced
  bool differenced = false;
  stats::StatTestResult adf;
};

/// ADF screen for integrating effects: difference once when the
/// unit-root null is not rejected.
inline ScreenResult screen_and_difference(std::span<const double> series,
                                          double significance = 0.05) {
  ScreenResult out;
  out.adf = stats::adf(series, significance);
  if (out.adf.reject_null) {
    out.series.assign(series.begin(), series.end());
    out.differenced = false;
  } else {
    out.series = stats::first_difference(series);
    out.differenced = true;
  }
  return out;
}

/// Non-seasonal order from the significant PACF coefficients: the
/// largest lag <= cap outside the +-1.96/sqrt(N) band, floor 1.
inline int select_order(std::span<const double> series, int cap = 5) {
  const int max_lag = std::min<int>(cap, static_cast<int>(series.size()) - 1);
  const auto pc = stats::pacf(series, max_lag);
  int p = 1;
  for (int lag = 1; lag <= max_lag; ++lag) {
    if (pc.significant(lag)) p = lag;
  }
  return p;
}

struct FitOptions {
  int max_iterations = 200;
  double tolerance = 1e-8;
  bool fix_seasonal_zero = false;  // constrain Phi = 0 (degenerates to AR(p))
};

/// Multiplicative seasonal AR by conditional least squares.
///
/// Alternates the two linear subproblems (phi, c | Phi) and (Phi, c | phi)
/// on the common sample t = p+s..N-1 until the parameter change drops
/// below tolerance. sigma^2 = RSS/N_eff with N_eff = N - p - s;
/// aic = N_eff ln(sigma^2) + 2(p + 2).
inline SarModel fit_multiplicative(std::span<const double> y, int p, int s,
                                   const FitOptions& opt = {}) {
  const int n = static_cast<int>(y.size());
  if (p < 1 || s < 2) throw std::invalid_argument("fit_multiplicative: need p >= 1, s >= 2");
  if (n <= 2 * (p + s)) throw std::invalid_argument("fit_multiplicative: need N > 2(p + s)");
  const int t0 = p + s;
  const int rows = n - t0;

  std::vector<double> phi(static_cast<std::size_t>(p), 0.0);
  double cap_phi = 0.0;  // Phi
  double c = 0.0;
  double delta = 0.0;

  std::vector<double> filtered(static_cast<std::size_t>(n));
  bool converged = false;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // (phi, c | Phi): regress z_t on z_{t-1}..z_{t-p}, z = (1 - Phi L^s) y
    for (int t = s; t < n; ++t) filtered[static_cast<std::size_t>(t)] = y[t] - cap_phi * y[t - s];
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(p),
                                          std::vector<double>(static_cast<std::size_t>(rows)));
    std::vector<double> dep(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      const int t = t0 + r;
      dep[static_cast<std::size_t>(r)] = filtered[static_cast<std::size_t>(t)];
      for (int j = 1; j <= p; ++j)
        cols[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(r)] =
            filtered[static_cast<std::size_t>(t - j)];
    }
    const auto fit_phi = stats::linreg(cols, dep, true);
    delta = 0.0;
    for (int j = 0; j < p; ++j) {
      delta = std::max(delta, std::fabs(fit_phi.weights[static_cast<std::size_t>(j)] -
                                        phi[static_cast<std::size_t>(j)]));
      phi[static_cast<std::size_t>(j)] = fit_phi.weights[static_cast<std::size_t>(j)];
    }
    c = fit_phi.intercept;

    if (!opt.fix_seasonal_zero) {
      // (Phi, c | phi): regress u_t on u_{t-s}, u = (1 - sum phi_i L^i) y
      for (int t = p; t < n; ++t) {
        double u = y[t];
        for (int j = 1; j <= p; ++j) u -= phi[static_cast<std::size_t>(j - 1)] * y[t - j];
        filtered[static_cast<std::size_t>(t)] = u;
      }
      std::vector<std::vector<double>> scol(1, std::vector<double>(static_cast<std::size_t>(rows)));
      for (int r = 0; r < rows; ++r) {
        const int t = t0 + r;
        dep[static_cast<std::size_t>(r)] = filtered[static_cast<std::size_t>(t)];
        scol[0][static_cast<std::size_t>(r)] = filtered[static_cast<std::size_t>(t - s)];
      }
      const auto fit_seasonal = stats::linreg(scol, dep, true);
      delta = std::max(delta, std::fabs(fit_seasonal.weights[0] - cap_phi));
      cap_phi = fit_seasonal.weights[0];
      c = fit_seasonal.intercept;
    }
    if (delta < opt.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw DataError("fit_multiplicative: no convergence after " +
                    std::to_string(opt.max_iterations) +
                    " iterations (last parameter change " + std::to_string(delta) + ")");
  }

  double rss = 0.0;
  for (int t = t0; t < n; ++t) {
    double e = y[t] - c - cap_phi * y[t - s];
    for (int j = 1; j <= p; ++j) {
      e -= phi[static_cast<std::size_t>(j - 1)] * (y[t - j] - cap_phi * y[t - s - j]);
    }
    rss += e * e;
  }

  SarModel m;
  m.kind = SarKind::Multiplicative;
  m.p = p;
  m.season = s;
  m.coeffs = phi;
  m.coeffs.push_back(cap_phi);
  m.intercept = c;
  m.noise_variance = rss / static_cast<double>(rows);
  m.aic = detail::sar_aic(rss, rows, p);
  m.train_mean = stats::mean(y);
  detail::check_fit_stationary(m);
  return m;
}

/// Additive seasonal AR: least squares AR(s) with only lags 1..p and
/// lag s free, fitted on the same sample window as the multiplicative
/// form so the information criteria are comparable.
inline SarModel fit_additive(std::span<const double> y, int p, int s) {
  const int n = static_cast<int>(y.size());
  if (p < 1 || s < 2 || p >= s) throw std::invalid_argument("fit_additive: need 1 <= p < s");
  if (n <= 2 * (p + s)) throw std::invalid_argument("fit_additive: need N > 2(p + s)");
  const int t0 = p + s;
  const int rows = n - t0;

  std::vector<int> lags;
  for (int j = 1; j <= p; ++j) lags.push_back(j);
  lags.push_back(s);

  std::vector<std::vector<double>> cols(lags.size(), std::vector<double>(static_cast<std::size_t>(rows)));
  std::vector<double> dep(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    const int t = t0 + r;
    dep[static_cast<std::size_t>(r)] = y[t];
    for (std::size_t j = 0; j < lags.size(); ++j)
      cols[j][static_cast<std::size_t>(r)] = y[t - lags[j]];
  }
  const auto fit = stats::linreg(cols, dep, true);

  SarModel m;
  m.kind = SarKind::Additive;
  m.p = p;
  m.season = s;
  m.coeffs.assign(static_cast<std::size_t>(s), 0.0);
  for (std::size_t j = 0; j < lags.size(); ++j)
    m.coeffs[static_cast<std::size_t>(lags[j] - 1)] = fit.weights[j];
  m.intercept = fit.intercept;
  m.noise_variance = fit.rss / static_cast<double>(rows);
  m.aic = detail::sar_aic(fit.rss, rows, p);
  m.train_mean = stats::mean(y);
  detail::check_fit_stationary(m);
  return m;
}

struct SarSelection {
  SarModel model;
  double aic_multiplicative = 0.0;
  double aic_additive = 0.0;
  std::string warning;  // non-empty when one fit failed
};

/// Fit both kinds and keep the better information criterion (lower aic
/// as defined here); ties go to the additive form. When one fit fails
/// the other is returned with a warning.
inline SarSelection fit_best(std::span<const double> y, int p, int s,
                             const FitOptions& opt = {}) {
  SarSelection sel;
  bool have_mult = false, have_add = false;
  SarModel mult, add;
  std::string err;
  try {
    mult = fit_multiplicative(y, p, s, opt);
    have_mult = true;
    sel.aic_multiplicative = mult.aic;
  } catch (const std::exception& e) {
    err = e.what();
  }
  try {
    add = fit_additive(y, p, s);
    have_add = true;
    sel.aic_additive = add.aic;
  } catch (const std::exception& e) {
    err = e.what();
  }
  if (!have_mult && !have_add) throw DataError("fit_best: both fits failed: " + err);
  if (have_mult && !have_add) {
    sel.model = mult;
    sel.warning = "additive fit failed: " + err;
  } else if (have_add && !have_mult) {
    sel.model = add;
    sel.warning = "multiplicative fit failed: " + err;
  } else {
    sel.model = add.aic <= mult.aic ? add : mult;
  }
  return sel;
}

struct SectionFit {
  SarModel model;
  double aic_multiplicative = 0.0;
  double aic_additive = 0.0;
  stats::StatTestResult adf;
  std::string warning;
};

/// Whole-section pipeline: ADF screen, PACF order selection, both fits,
/// AIC choice. `series` is the date-ordered concatenation in the model
/// domain (log for the lognormal variant).
inline SectionFit fit_section(std::span<const double> series, int season,
                              double significance = 0.05, int order_cap = 5,
                              const FitOptions& opt = {}) {
  const double level_mean = stats::mean(series);
  ScreenResult sc = screen_and_difference(series, significance);
  const int p = select_order(sc.series, order_cap);
  SarSelection sel = fit_best(sc.series, p, season, opt);
  SectionFit out;
  out.model = std::move(sel.model);
  out.model.differenced = sc.differenced;
  out.model.train_mean = level_mean;
  out.aic_multiplicative = sel.aic_multiplicative;
  out.aic_additive = sel.aic_additive;
  out.adf = sc.adf;
  out.warning = std::move(sel.warning);
  return out;
}

/// Iterated linear prediction for h steps past the end of `history`
/// (levels in the model domain). Unknown future values are replaced by
/// their own predictions; differenced models predict increments and
/// cumulate them onto the last observed level.
inline std::vector<double> forecast(const SarModel& m, std::span<const double> history, int h) {
  if (h < 1) throw std::invalid_argument("forecast: need h >= 1");
  const int need = m.p + m.season + (m.differenced ? 1 : 0);
  if (static_cast<int>(history.size()) < need)
    throw std::invalid_argument("forecast: insufficient history (need " + std::to_string(need) +
                                " values)");

  std::vector<double> w;
  if (m.differenced) {
    w = stats::first_difference(history);
  } else {
    w.assign(history.begin(), history.end());
  }
  for (int step = 0; step < h; ++step) {
    const std::size_t end = w.size();
    double next = m.intercept;
    if (m.kind == SarKind::Multiplicative) {
      const double cap_phi = m.coeffs[static_cast<std::size_t>(m.p)];
      next += cap_phi * w[end - static_cast<std::size_t>(m.season)];
      for (int i = 1; i <= m.p; ++i) {
        const double phi_i = m.coeffs[static_cast<std::size_t>(i - 1)];
        next += phi_i * w[end - static_cast<std::size_t>(i)];
        next -= cap_phi * phi_i * w[end - static_cast<std::size_t>(m.season + i)];
      }
    } else {
      for (int i = 1; i <= m.season; ++i)
        next += m.coeffs[static_cast<std::size_t>(i - 1)] * w[end - static_cast<std::size_t>(i)];
    }
    w.push_back(next);
  }
  std::vector<double> out(w.end() - h, w.end());
  if (m.differenced) {
    double level = history.back();
    for (auto& v : out) {
      level += v;
      v = level;
    }
  }
  return out;
}

/// Point prediction in seconds, h steps ahead. The log-domain model
/// forecasts on log history and exponentiates — the median of the
/// conditional lognormal. The linear (Gaussian) ablation skips the
/// transform pair.
inline double predict_travel_time(const SarModel& m, std::span<const double> history_seconds,
                                  int h) {
  if (m.domain == Domain::Log) {
    std::vector<double> logs(history_seconds.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
      if (history_seconds[i] <= 0.0)
        throw DataError("predict_travel_time: history must be positive");
      logs[i] = std::log(history_seconds[i]);
    }
    return std::exp(forecast(m, logs, h).back());
  }
  return std::max(forecast(m, history_seconds, h).back(), 1e-9);
}

}  // namespace bustt::sar
