#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bustt/geo.hpp"

using bustt::GeoPoint;
using bustt::haversine_m;
using bustt::kEarthRadiusM;

namespace {

// independent oracle: spherical law of cosines
double law_of_cosines_m(const GeoPoint& a, const GeoPoint& b) {
  const double p1 = bustt::deg2rad(a.lat), p2 = bustt::deg2rad(b.lat);
  const double dl = bustt::deg2rad(b.lon - a.lon);
  const double c = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return kEarthRadiusM * std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

TEST_CASE("haversine of coincident points is exactly zero") {
  const GeoPoint p{13.05, 80.20};
  REQUIRE(haversine_m(p, p) == 0.0);
}

TEST_CASE("haversine of one equatorial degree") {
  // pi/180 * R = 111194.93 m
  const double d = haversine_m({0.0, 0.0}, {0.0, 1.0});
  REQUIRE_THAT(d, Catch::Matchers::WithinAbs(111'195.0, 1.0));
}

TEST_CASE("haversine agrees with the law-of-cosines oracle") {
  const GeoPoint a{13.05, 80.20}, b{13.05, 80.21};
  REQUIRE_THAT(haversine_m(a, b), Catch::Matchers::WithinAbs(law_of_cosines_m(a, b), 0.01));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lat(12.5, 13.5), lon(79.5, 80.5);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint p{lat(rng), lon(rng)}, q{lat(rng), lon(rng)};
    REQUIRE_THAT(haversine_m(p, q), Catch::Matchers::WithinAbs(law_of_cosines_m(p, q), 0.01));
  }
}

TEST_CASE("haversine is symmetric") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(-179.0, 179.0);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint p{lat(rng), lon(rng)}, q{lat(rng), lon(rng)};
    REQUIRE(haversine_m(p, q) == haversine_m(q, p));
  }
}

TEST_CASE("haversine satisfies the triangle inequality") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lat(-60.0, 60.0), lon(-179.0, 179.0);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a{lat(rng), lon(rng)}, b{lat(rng), lon(rng)}, c{lat(rng), lon(rng)};
    REQUIRE(haversine_m(a, c) <= haversine_m(a, b) + haversine_m(b, c) + 1e-6);
  }
}
