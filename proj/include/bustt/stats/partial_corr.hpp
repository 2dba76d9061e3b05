#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "bustt/stats/distributions.hpp"
#include "bustt/stats/linreg.hpp"
#include "bustt/stats/result.hpp"

namespace bustt::stats {

/// Which t-statistic form pc_t_test uses. Paper keeps the (1 - PC^2)
/// denominator as published; Conventional uses sqrt(1 - PC^2).
enum class PcTstat { Paper, Conventional };

struct PartialCorrResult {
  double pc = 0.0;
  std::vector<double> forward_weights;   // [w0 (intercept), w1, ..., wm]
  std::vector<double> backward_weights;  // same layout
  std::vector<double> forward_residuals;
  std::vector<double> backward_residuals;
  double t_star = 0.0;  // paper-form statistic, PC*sqrt(d-2)/(1-PC^2)
  int df = 0;           // d - 2
  bool degenerate = false;
};

/// Partial correlation of x and y given the columns of Z: the Pearson
/// correlation between the residuals of the two intercept regressions.
/// Empty Z reduces to the plain Pearson correlation. A zero-variance
/// residual on either side yields pc = 0 with the degenerate flag set.
inline PartialCorrResult partial_corr(std::span<const double> x,
                                      std::span<const double> y,
                                      const std::vector<std::vector<double>>& z) {
  const std::size_t d = x.size();
  const std::size_t m = z.size();
  if (y.size() != d) throw std::invalid_argument("partial_corr: length mismatch");
  if (d <= m + 2) throw std::invalid_argument("partial_corr: need d > m + 2");

  const LinregResult fx = linreg(z, x, true);
  const LinregResult fy = linreg(z, y, true);

  PartialCorrResult out;
  out.df = static_cast<int>(d) - 2;
  out.forward_weights.reserve(m + 1);
  out.forward_weights.push_back(fx.intercept);
  out.forward_weights.insert(out.forward_weights.end(), fx.weights.begin(), fx.weights.end());
  out.backward_weights.reserve(m + 1);
  out.backward_weights.push_back(fy.intercept);
  out.backward_weights.insert(out.backward_weights.end(), fy.weights.begin(), fy.weights.end());
  out.forward_residuals = fx.residuals;
  out.backward_residuals = fy.residuals;

  double ss_x = 0.0, ss_y = 0.0, total_x = 0.0, total_y = 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(d);
  my /= static_cast<double>(d);
  double sxy = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    ss_x += fx.residuals[i] * fx.residuals[i];
    ss_y += fy.residuals[i] * fy.residuals[i];
    sxy += fx.residuals[i] * fy.residuals[i];
    total_x += (x[i] - mx) * (x[i] - mx);
    total_y += (y[i] - my) * (y[i] - my);
  }
  const bool degenerate_x = ss_x <= 1e-18 * std::max(1.0, total_x);
  const bool degenerate_y = ss_y <= 1e-18 * std::max(1.0, total_y);
  if (degenerate_x || degenerate_y) {
    out.pc = 0.0;
    out.degenerate = true;
    out.t_star = 0.0;
    return out;
  }
  double pc = sxy / std::sqrt(ss_x * ss_y);
  pc = std::clamp(pc, -1.0, 1.0);
  out.pc = pc;
  if (std::fabs(pc) < 1.0) {
    out.t_star = pc * std::sqrt(static_cast<double>(out.df)) / (1.0 - pc * pc);
  } else {
    out.t_star = pc > 0 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
  }
  return out;
}

/// t-test of the null PC == 0 with d - 2 degrees of freedom, two-sided.
/// Default statistic follows the published form t* = PC*sqrt(d-2)/(1-PC^2).
inline StatTestResult pc_t_test(double pc, int d, double significance = 0.05,
                                PcTstat variant = PcTstat::Paper) {
  if (d <= 2) throw std::invalid_argument("pc_t_test: need d > 2");
  if (std::fabs(pc) > 1.0) throw std::invalid_argument("pc_t_test: |pc| > 1");
  const double df = static_cast<double>(d - 2);
  if (std::fabs(pc) >= 1.0) {
    StatTestResult r;
    r.statistic = pc > 0 ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.reject_null = true;
    r.meta = d - 2;
    return r;
  }
  const double denom = variant == PcTstat::Paper ? (1.0 - pc * pc) : std::sqrt(1.0 - pc * pc);
  const double t = pc * std::sqrt(df) / denom;
  const double p = student_t_two_sided_p(t, df);
  return make_test_result(t, p, significance, d - 2);
}

}  // namespace bustt::stats
