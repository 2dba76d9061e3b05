#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "bustt/eval/synth.hpp"
#include "bustt/sar.hpp"
#include "bustt/stats/correlogram.hpp"
#include "bustt/stats/linreg.hpp"
#include "test_helpers.hpp"

using namespace bustt;
using sar::fit_additive;
using sar::fit_best;
using sar::fit_multiplicative;
using sar::FitOptions;
using sar::forecast;
using sar::SarKind;
using sar::SarModel;
using sar::screen_and_difference;
using sar::select_order;

namespace {

std::vector<double> synth_sar(std::vector<double> phi, double cap_phi, int days, int bins,
                              std::uint64_t seed, double sigma = 0.3, bool additive = false) {
  eval::SynthSpec spec;
  spec.kind = additive ? eval::SynthKind::SarAdditive : eval::SynthKind::SarMultiplicative;
  spec.phi = std::move(phi);
  spec.seasonal_phi = cap_phi;
  spec.days = days;
  spec.bins = bins;
  spec.seed = seed;
  spec.sigma = sigma;
  spec.mu = 0.0;
  return eval::synth_log_series(spec);
}

}  // namespace

TEST_CASE("screen_and_difference: stationary fixture passes through") {
  const auto y = synth_sar({0.5, 0.2}, 0.3, 27, 19, 11);
  const auto r = screen_and_difference(y);
  REQUIRE_FALSE(r.differenced);
  REQUIRE(r.series.size() == y.size());
  REQUIRE(r.adf.reject_null);
}

TEST_CASE("screen_and_difference: random walk is differenced once") {
  const auto y = testutil::random_walk(513, 4);
  const auto r = screen_and_difference(y);
  REQUIRE(r.differenced);
  REQUIRE(r.series.size() == y.size() - 1);
  // the differenced series re-screens clean
  const auto again = screen_and_difference(r.series);
  REQUIRE_FALSE(again.differenced);
}

TEST_CASE("select_order: white noise falls back to p = 1") {
  REQUIRE(select_order(testutil::white_noise(513, 21)) == 1);
}

TEST_CASE("select_order: seasonal fixture with p = 2 dynamics selects 2") {
  const auto y = synth_sar({0.5, 0.2}, 0.3, 27, 19, 2);
  REQUIRE(select_order(y) == 2);
}

TEST_CASE("select_order: AR(3) order recovery study") {
  int correct = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto y = testutil::ar_p({0.35, 0.25, 0.25}, 513, 3000 + static_cast<std::uint64_t>(r));
    if (select_order(y) == 3) ++correct;
  }
  REQUIRE(correct >= static_cast<int>(0.80 * reps));
}

TEST_CASE("fit_multiplicative: coefficient recovery on (1-0.5L)(1-0.3L^19)") {
  const auto y = synth_sar({0.5}, 0.3, 27 * 40, 19, 5);  // 27*19*40 points
  const auto m = fit_multiplicative(y, 1, 19);
  REQUIRE_THAT(m.coeffs[0], Catch::Matchers::WithinAbs(0.5, 0.05));
  REQUIRE_THAT(m.coeffs[1], Catch::Matchers::WithinAbs(0.3, 0.05));
  REQUIRE(m.noise_variance > 0.0);
}

TEST_CASE("fit_multiplicative: seasonal coefficient constrained to zero degenerates to AR(p)") {
  const auto y = testutil::ar1(0.6, 600, 6);
  FitOptions opt;
  opt.fix_seasonal_zero = true;
  const int p = 1, s = 19;
  const auto m = fit_multiplicative(y, p, s, opt);
  REQUIRE(m.coeffs[1] == 0.0);

  // direct AR(1) least squares on the same sample window
  const int t0 = p + s;
  std::vector<double> dep(y.begin() + t0, y.end());
  std::vector<double> lag1(y.begin() + t0 - 1, y.end() - 1);
  const auto lr = stats::linreg({lag1}, dep, true);
  REQUIRE_THAT(m.coeffs[0], Catch::Matchers::WithinAbs(lr.weights[0], 1e-6));
  REQUIRE_THAT(m.intercept, Catch::Matchers::WithinAbs(lr.intercept, 1e-6));
}

TEST_CASE("fit_multiplicative: white-noise null fit keeps coefficients inside 1.96 SE") {
  const auto y = testutil::white_noise(513, 3);
  const auto m = fit_multiplicative(y, 1, 19);
  const double se = 1.96 / std::sqrt(static_cast<double>(y.size()));
  REQUIRE(std::fabs(m.coeffs[0]) < se);
  REQUIRE(std::fabs(m.coeffs[1]) < se);
}

TEST_CASE("fit_additive: zero-constrained pattern stores lags 1..p and s only") {
  const auto y = synth_sar({0.4}, 0.25, 54, 19, 7, 0.3, true);
  const auto m = fit_additive(y, 2, 19);
  REQUIRE(m.coeffs.size() == 19);
  for (int lag = 3; lag <= 18; ++lag) REQUIRE(m.coeffs[static_cast<std::size_t>(lag - 1)] == 0.0);
  REQUIRE(m.coeffs[0] != 0.0);
  REQUIRE(m.coeffs[18] != 0.0);
}

TEST_CASE("fit_additive: recovery of an additive seasonal AR") {
  const auto y = synth_sar({0.4}, 0.25, 27 * 20, 19, 8, 0.3, true);
  const auto m = fit_additive(y, 1, 19);
  REQUIRE_THAT(m.coeffs[0], Catch::Matchers::WithinAbs(0.4, 0.05));
  REQUIRE_THAT(m.coeffs[18], Catch::Matchers::WithinAbs(0.25, 0.05));
}

TEST_CASE("fit_additive: p = 1, s = 2 equals a direct two-lag regression") {
  const auto y = testutil::ar_p({0.5, 0.2}, 200, 9);
  const auto m = fit_additive(y, 1, 2);
  const int t0 = 3;  // p + s
  const int rows = static_cast<int>(y.size()) - t0;
  std::vector<double> dep(rows), l1(rows), l2(rows);
  for (int r = 0; r < rows; ++r) {
    dep[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(t0 + r)];
    l1[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(t0 + r - 1)];
    l2[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(t0 + r - 2)];
  }
  const auto lr = stats::linreg({l1, l2}, dep, true);
  REQUIRE_THAT(m.coeffs[0], Catch::Matchers::WithinAbs(lr.weights[0], 1e-10));
  REQUIRE_THAT(m.coeffs[1], Catch::Matchers::WithinAbs(lr.weights[1], 1e-10));
  REQUIRE_THAT(m.intercept, Catch::Matchers::WithinAbs(lr.intercept, 1e-10));
}

TEST_CASE("fit_best: selection studies prefer the generating kind") {
  int mult_selected = 0, add_selected = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const auto ym = synth_sar({0.5}, 0.4, 27, 19, 9000 + static_cast<std::uint64_t>(r));
    if (fit_best(ym, 1, 19).model.kind == SarKind::Multiplicative) ++mult_selected;
    const auto ya =
        synth_sar({0.5}, 0.3, 27, 19, 7000 + static_cast<std::uint64_t>(r), 0.3, true);
    if (fit_best(ya, 1, 19).model.kind == SarKind::Additive) ++add_selected;
  }
  REQUIRE(mult_selected >= static_cast<int>(0.70 * reps));
  REQUIRE(add_selected >= static_cast<int>(0.70 * reps));
}

TEST_CASE("fit_best: reports both information criteria and picks the lower") {
  const auto y = synth_sar({0.5}, 0.3, 27, 19, 17);
  const auto sel = fit_best(y, 1, 19);
  REQUIRE(sel.warning.empty());
  REQUIRE(sel.model.aic ==
          std::min(sel.aic_multiplicative, sel.aic_additive));
  if (sel.aic_additive == sel.aic_multiplicative) {
    REQUIRE(sel.model.kind == SarKind::Additive);  // tie rule
  }
}

TEST_CASE("forecast: AR(1) hand values") {
  SarModel m;
  m.kind = SarKind::Multiplicative;
  m.p = 1;
  m.season = 2;
  m.coeffs = {0.6, 0.0};
  m.intercept = 0.0;
  const std::vector<double> history{0.0, 0.0, 2.0};
  const auto f = forecast(m, history, 2);
  REQUIRE_THAT(f[0], Catch::Matchers::WithinAbs(1.2, 1e-12));
  REQUIRE_THAT(f[1], Catch::Matchers::WithinAbs(0.72, 1e-12));
}

TEST_CASE("forecast: differenced model with zero increments repeats the last level") {
  SarModel m;
  m.kind = SarKind::Additive;
  m.p = 1;
  m.season = 2;
  m.coeffs = {0.0, 0.0};
  m.intercept = 0.0;
  m.differenced = true;
  const std::vector<double> history{3.0, 5.0, 4.0, 7.0};
  const auto f = forecast(m, history, 3);
  for (double v : f) REQUIRE_THAT(v, Catch::Matchers::WithinAbs(7.0, 1e-12));
}

TEST_CASE("forecast: multiplicative model equals its expanded AR(p+s) polynomial") {
  SarModel mult;
  mult.kind = SarKind::Multiplicative;
  mult.p = 1;
  mult.season = 2;
  mult.coeffs = {0.5, 0.3};
  mult.intercept = 0.1;

  SarModel expanded;
  expanded.kind = SarKind::Additive;
  expanded.p = 1;
  expanded.season = 3;  // lag span p + s
  expanded.coeffs = {0.5, 0.3, -0.15};
  expanded.intercept = 0.1;

  std::mt19937_64 rng(23);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> history(12);
  for (auto& v : history) v = d(rng);
  const auto a = forecast(mult, history, 8);
  const auto b = forecast(expanded, history, 8);
  for (int h = 0; h < 8; ++h) {
    REQUIRE_THAT(a[static_cast<std::size_t>(h)],
                 Catch::Matchers::WithinAbs(b[static_cast<std::size_t>(h)], 1e-10));
  }
}

TEST_CASE("forecast: one step equals the direct dot product") {
  const auto y = synth_sar({0.5, 0.2}, 0.3, 27, 19, 2);
  const auto m = fit_multiplicative(y, 2, 19);
  const auto f = forecast(m, y, 1);
  const std::size_t e = y.size();
  double direct = m.intercept + m.coeffs[2] * y[e - 19];
  direct += m.coeffs[0] * (y[e - 1] - m.coeffs[2] * y[e - 20]);
  direct += m.coeffs[1] * (y[e - 2] - m.coeffs[2] * y[e - 21]);
  REQUIRE_THAT(f[0], Catch::Matchers::WithinAbs(direct, 1e-12));
}

TEST_CASE("forecast: insufficient history is rejected") {
  SarModel m;
  m.kind = SarKind::Additive;
  m.p = 1;
  m.season = 19;
  m.coeffs.assign(19, 0.0);
  const std::vector<double> history(10, 1.0);
  REQUIRE_THROWS_AS(forecast(m, history, 1), std::invalid_argument);
}

TEST_CASE("predict_travel_time: exponentiation pairs and positivity") {
  SarModel m;
  m.kind = SarKind::Additive;
  m.p = 1;
  m.season = 2;
  m.coeffs = {0.0, 0.0};
  m.intercept = 0.0;
  m.domain = sar::Domain::Log;
  const std::vector<double> history{60.0, 60.0, 60.0};
  REQUIRE_THAT(sar::predict_travel_time(m, history, 1), Catch::Matchers::WithinAbs(1.0, 1e-12));
  m.intercept = std::log(60.0);
  REQUIRE_THAT(sar::predict_travel_time(m, history, 1), Catch::Matchers::WithinAbs(60.0, 1e-9));
  REQUIRE(sar::predict_travel_time(m, history, 5) > 0.0);
}

TEST_CASE("predict_travel_time: log-domain beats the linear ablation on heavy-tailed data") {
  // lognormal AR(1) with fat log-noise
  const auto logs = synth_sar({0.6}, 0.0, 80, 19, 91, 0.8);
  std::vector<double> seconds(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) seconds[i] = std::exp(4.0 + logs[i]);

  const std::size_t split = seconds.size() - 200;
  std::vector<double> train_log(logs.begin(), logs.begin() + static_cast<long>(split));
  for (auto& v : train_log) v += 4.0;
  std::vector<double> train_lin(seconds.begin(), seconds.begin() + static_cast<long>(split));

  auto log_model = fit_multiplicative(train_log, 1, 19);
  log_model.domain = sar::Domain::Log;
  auto lin_model = fit_multiplicative(train_lin, 1, 19);
  lin_model.domain = sar::Domain::Linear;

  double err_log = 0.0, err_lin = 0.0;
  for (std::size_t t = split; t < seconds.size(); ++t) {
    const std::span<const double> hist(seconds.data(), t);
    err_log += std::fabs(seconds[t] - sar::predict_travel_time(log_model, hist, 1));
    err_lin += std::fabs(seconds[t] - sar::predict_travel_time(lin_model, hist, 1));
  }
  REQUIRE(err_log < err_lin);
}

TEST_CASE("fitted multiplicative model leaves white out-of-sample residuals") {
  int passed = 0;
  const int reps = 25;
  for (int r = 0; r < reps; ++r) {
    const auto y = synth_sar({0.5}, 0.3, 54, 19, 40'000 + static_cast<std::uint64_t>(r));
    const std::size_t split = y.size() / 2;
    const std::vector<double> train(y.begin(), y.begin() + static_cast<long>(split));
    const auto m = fit_multiplicative(train, 1, 19);
    std::vector<double> residuals;
    for (std::size_t t = split; t < y.size(); ++t) {
      const std::span<const double> hist(y.data(), t);
      residuals.push_back(y[t] - forecast(m, hist, 1)[0]);
    }
    const auto a = stats::acf(residuals, 10);
    int outside = 0;
    for (int k = 1; k <= 10; ++k) {
      if (std::fabs(a.at(k)) > a.band) ++outside;
    }
    // whiteness check: at most one of ten lags escapes the 95% band
    // (all-ten-strictly-inside would itself only pass ~60% of the time
    // for genuinely white residuals)
    if (outside <= 1) ++passed;
  }
  REQUIRE(passed >= static_cast<int>(0.80 * reps));
}
