#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "bustt/stats/descriptive.hpp"
#include "bustt/stats/distributions.hpp"

using namespace bustt::stats;

TEST_CASE("percentile_linear interpolates order statistics") {
  REQUIRE(percentile_linear({1, 2, 3, 4, 5}, 0.5) == 3.0);
  REQUIRE(percentile_linear({1, 2, 3, 4}, 0.5) == 2.5);
  REQUIRE(percentile_linear({10, 20}, 0.95) == 19.5);
  REQUIRE(percentile_linear({7}, 0.25) == 7.0);
}

TEST_CASE("geometric mean matches the log-domain arithmetic mean") {
  const std::vector<double> v{50.0, 72.0};
  REQUIRE_THAT(geometric_mean(v), Catch::Matchers::WithinAbs(60.0, 1e-9));
  REQUIRE_THROWS(geometric_mean(std::vector<double>{1.0, -2.0}));
}

TEST_CASE("normal cdf reference points") {
  REQUIRE(normal_cdf(0.0) == 0.5);
  REQUIRE_THAT(normal_cdf(1.959963985), Catch::Matchers::WithinAbs(0.975, 1e-6));
  REQUIRE_THAT(normal_cdf(-1.0) + normal_cdf(1.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("student t cdf matches table quantiles") {
  REQUIRE(student_t_cdf(0.0, 10.0) == 0.5);
  // t_{0.975} quantiles: df 10 -> 2.2281, df 25 -> 2.0595
  REQUIRE_THAT(student_t_two_sided_p(2.228138852, 10.0), Catch::Matchers::WithinAbs(0.05, 1e-6));
  REQUIRE_THAT(student_t_two_sided_p(2.059538553, 25.0), Catch::Matchers::WithinAbs(0.05, 1e-6));
  // converges to the normal for large df
  REQUIRE_THAT(student_t_cdf(1.959963985, 1e7), Catch::Matchers::WithinAbs(0.975, 1e-5));
}

TEST_CASE("regularized incomplete beta symmetry") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 0.95), ab(0.5, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double a = ab(rng), b = ab(rng), x = u(rng);
    REQUIRE_THAT(reg_incomplete_beta(a, b, x) + reg_incomplete_beta(b, a, 1.0 - x),
                 Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("kolmogorov survival function") {
  // critical value: Q(1.358) ~ 0.05
  REQUIRE_THAT(kolmogorov_q(1.3581), Catch::Matchers::WithinAbs(0.05, 2e-3));
  REQUIRE(kolmogorov_q(0.05) == 1.0);
  REQUIRE(kolmogorov_q(5.0) < 1e-9);
  // continuity across the series switch at 1.18
  REQUIRE_THAT(kolmogorov_q(1.1799), Catch::Matchers::WithinAbs(kolmogorov_q(1.1801), 1e-4));
  // monotone decreasing
  double prev = 1.0;
  for (double l = 0.3; l < 2.5; l += 0.05) {
    const double q = kolmogorov_q(l);
    REQUIRE(q <= prev + 1e-12);
    prev = q;
  }
}
