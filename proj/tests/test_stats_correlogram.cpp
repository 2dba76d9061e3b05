#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/stats/correlogram.hpp"
#include "test_helpers.hpp"

using namespace bustt;
using stats::acf;
using stats::pacf;

TEST_CASE("acf at lag zero is one") {
  const auto x = testutil::white_noise(200, 1);
  REQUIRE(acf(x, 10).at(0) == 1.0);
}

TEST_CASE("acf of white noise stays inside 3/sqrt(N)") {
  const int n = 100'000;
  const auto x = testutil::white_noise(n, 2024);
  const auto a = acf(x, 20);
  const double bound = 3.0 / std::sqrt(static_cast<double>(n));
  for (int k = 1; k <= 20; ++k) REQUIRE(std::fabs(a.at(k)) < bound);
}

TEST_CASE("acf of AR(1) decays like phi^k") {
  const auto x = testutil::ar1(0.6, 100'000, 99);
  const auto a = acf(x, 5);
  for (int k = 1; k <= 5; ++k) {
    REQUIRE_THAT(a.at(k), Catch::Matchers::WithinAbs(std::pow(0.6, k), 0.02));
  }
}

TEST_CASE("acf magnitudes never exceed one") {
  const auto x = testutil::ar1(0.95, 3000, 5);
  const auto a = acf(x, 50);
  for (int k = 0; k <= 50; ++k) REQUIRE(std::fabs(a.at(k)) <= 1.0 + 1e-12);
}

TEST_CASE("pacf lag one equals acf lag one exactly") {
  const auto x = testutil::ar1(0.4, 5000, 17);
  REQUIRE(pacf(x, 8).at(1) == acf(x, 8).at(1));
}

TEST_CASE("pacf of AR(1) cuts off after lag one") {
  const auto x = testutil::ar1(0.6, 100'000, 31);
  const auto p = pacf(x, 10);
  REQUIRE_THAT(p.at(1), Catch::Matchers::WithinAbs(0.6, 0.02));
  int outside = 0;
  for (int k = 2; k <= 10; ++k) {
    if (std::fabs(p.at(k)) > p.band) ++outside;
  }
  REQUIRE(outside <= 1);  // ~5% of lags may graze the band by chance
}

TEST_CASE("pacf of AR(2) cuts off after lag two") {
  const auto x = testutil::ar_p({0.5, 0.3}, 100'000, 77);
  const auto p = pacf(x, 10);
  REQUIRE(p.significant(1));
  REQUIRE(p.significant(2));
  REQUIRE_THAT(p.at(2), Catch::Matchers::WithinAbs(0.3, 0.02));
  int outside = 0;
  for (int k = 3; k <= 10; ++k) {
    if (std::fabs(p.at(k)) > p.band) ++outside;
  }
  REQUIRE(outside <= 1);
}

TEST_CASE("pacf of white noise stays inside the band") {
  const auto x = testutil::white_noise(50'000, 12);
  const auto p = pacf(x, 20);
  int outside = 0;
  for (int k = 1; k <= 20; ++k) {
    if (std::fabs(p.at(k)) > p.band) ++outside;
  }
  REQUIRE(outside <= 2);
}

TEST_CASE("degenerate series is rejected") {
  const std::vector<double> flat(100, 3.0);
  REQUIRE_THROWS_AS(acf(flat, 5), DataError);
  REQUIRE_THROWS_AS(pacf(flat, 5), DataError);
}

TEST_CASE("acf rejects a max_lag at or past the series length") {
  const auto x = testutil::white_noise(10, 3);
  REQUIRE_THROWS_AS(acf(x, 10), std::invalid_argument);
}
