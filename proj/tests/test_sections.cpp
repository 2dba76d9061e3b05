#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/eval/gps_fixture.hpp"
#include "bustt/ingest/sections.hpp"

using namespace bustt;
using ingest::clean;
using ingest::CleanOptions;
using ingest::SectionGrid;
using ingest::sectionize;
using ingest::TravelTimeRecord;
using ingest::TripTrace;

namespace {

constexpr double kLat0 = 13.0, kLon0 = 80.2;

// trip along the meridian with explicit (distance, time) samples
TripTrace make_trip(const std::vector<std::pair<double, std::int64_t>>& samples) {
  TripTrace t;
  t.trip_id = "t0";
  t.direction = ingest::Direction::Onward;
  for (const auto& [x, ts] : samples) {
    t.fixes.push_back({"bus", ts, {kLat0 + x / eval::kMetersPerDegreeLat, kLon0}});
  }
  t.cumulative_m.resize(t.fixes.size());
  t.cumulative_m[0] = 0.0;
  for (std::size_t i = 1; i < t.fixes.size(); ++i) {
    t.cumulative_m[i] =
        t.cumulative_m[i - 1] + haversine_m(t.fixes[i - 1].pos, t.fixes[i].pos);
  }
  t.service_day = t.fixes.front().timestamp / 86400;
  return t;
}

TravelTimeRecord rec(int section, double tt) {
  TravelTimeRecord r;
  r.section = section;
  r.travel_time_s = tt;
  return r;
}

}  // namespace

TEST_CASE("sectionize: constant 10 m/s trace gives 50 s per 500 m section") {
  std::vector<std::pair<double, std::int64_t>> samples;
  const std::int64_t t0 = 1'700'000'000;
  for (int i = 0; i <= 400; ++i) samples.emplace_back(i * 50.0, t0 + i * 5);  // 20 km
  const auto trip = make_trip(samples);
  const auto records = sectionize(trip, SectionGrid{500.0, 20'000.0});
  REQUIRE(records.size() == 40);
  for (const auto& r : records) {
    REQUIRE_THAT(r.travel_time_s, Catch::Matchers::WithinAbs(50.0, 1e-6));
  }
  // entry times advance by one section time
  for (std::size_t i = 1; i < records.size(); ++i) {
    REQUIRE_THAT(records[i].entry_time_s - records[i - 1].entry_time_s,
                 Catch::Matchers::WithinAbs(50.0, 1e-6));
  }
}

TEST_CASE("sectionize: conservation of total time across completed sections") {
  // uneven speeds
  std::vector<std::pair<double, std::int64_t>> samples;
  std::int64_t t = 1'700'000'000;
  double x = 0.0;
  std::vector<double> speeds = {8.0, 12.5, 9.0, 15.0, 7.0};
  for (int leg = 0; leg < 5; ++leg) {
    for (int i = 0; i < 40; ++i) {
      samples.emplace_back(x, t);
      x += speeds[static_cast<std::size_t>(leg)] * 5.0;
      t += 5;
    }
  }
  samples.emplace_back(x, t);
  const auto trip = make_trip(samples);
  const SectionGrid grid{500.0, 10'000.0};
  const auto records = sectionize(trip, grid);
  REQUIRE_FALSE(records.empty());
  double total = 0.0;
  for (const auto& r : records) total += r.travel_time_s;
  const double first_entry = records.front().entry_time_s;
  const double last_exit = records.back().entry_time_s + records.back().travel_time_s;
  REQUIRE_THAT(total, Catch::Matchers::WithinAbs(last_exit - first_entry, 1e-9));
}

TEST_CASE("sectionize: a trip covering exactly one section yields one record") {
  const auto trip = make_trip({{0.0, 1000}, {250.0, 1025}, {500.0, 1050}});
  const auto records = sectionize(trip, SectionGrid{500.0, 5000.0});
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].section == 0);
  REQUIRE_THAT(records[0].travel_time_s, Catch::Matchers::WithinAbs(50.0, 1e-9));
}

TEST_CASE("sectionize: a fix exactly on a boundary anchors the crossing time") {
  const auto trip = make_trip({{0.0, 1000}, {500.0, 1077}, {1000.0, 1140}});
  const auto records = sectionize(trip, SectionGrid{500.0, 1000.0});
  REQUIRE(records.size() == 2);
  const double sod = 1077.0;  // timestamps < 86400 so seconds-of-day == timestamp
  REQUIRE_THAT(records[1].entry_time_s, Catch::Matchers::WithinAbs(sod, 1e-9));
  REQUIRE_THAT(records[0].travel_time_s, Catch::Matchers::WithinAbs(77.0, 1e-9));
  REQUIRE_THAT(records[1].travel_time_s, Catch::Matchers::WithinAbs(63.0, 1e-9));
}

TEST_CASE("sectionize: zero-distance trip yields no records") {
  const auto trip = make_trip({{0.0, 1000}, {0.0, 1200}});
  REQUIRE(sectionize(trip, SectionGrid{500.0, 5000.0}).empty());
}

TEST_CASE("clean: paper lower bound, 30 s for 500 m at 60 km/h") {
  std::vector<TravelTimeRecord> hist;
  for (int i = 0; i < 30; ++i) hist.push_back(rec(0, 60.0 + i));
  auto out = clean({rec(0, 20.0)}, SectionGrid{500.0, 500.0}, hist);
  REQUIRE_THAT(out[0].travel_time_s, Catch::Matchers::WithinAbs(30.0, 1e-12));
}

TEST_CASE("clean: in-range values pass through unchanged") {
  std::vector<TravelTimeRecord> hist;
  for (int i = 0; i < 18; ++i) hist.push_back(rec(0, 100.0));
  hist.push_back(rec(0, 300.0));
  hist.push_back(rec(0, 300.0));
  auto out = clean({rec(0, 100.0)}, SectionGrid{500.0, 500.0}, hist);
  REQUIRE(out[0].travel_time_s == 100.0);
}

TEST_CASE("clean: clamps to the section's 95th percentile") {
  // 18 x 100 plus 2 x 300: rank 0.95*(20-1) = 18.05 interpolates between
  // two 300s, so the cap is exactly 300
  std::vector<TravelTimeRecord> hist;
  for (int i = 0; i < 18; ++i) hist.push_back(rec(0, 100.0));
  hist.push_back(rec(0, 300.0));
  hist.push_back(rec(0, 300.0));
  auto out = clean({rec(0, 400.0)}, SectionGrid{500.0, 500.0}, hist);
  REQUIRE_THAT(out[0].travel_time_s, Catch::Matchers::WithinAbs(300.0, 1e-12));
}

TEST_CASE("clean: sparse sections fall back to the global percentile") {
  std::vector<TravelTimeRecord> hist;
  for (int i = 0; i < 50; ++i) hist.push_back(rec(0, 100.0));  // global p95 = 100
  hist.push_back(rec(1, 500.0));                               // section 1 has 1 observation
  auto out = clean({rec(1, 400.0)}, SectionGrid{500.0, 1000.0}, hist);
  // global p95 over {50x100, 500}: rank 0.95*50 = 47.5 -> 100
  REQUIRE_THAT(out[0].travel_time_s, Catch::Matchers::WithinAbs(100.0, 1e-9));
}

TEST_CASE("clean: idempotent for a fixed historical set") {
  std::vector<TravelTimeRecord> hist;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(10.0, 500.0);
  for (int i = 0; i < 200; ++i) hist.push_back(rec(i % 4, d(rng)));
  std::vector<TravelTimeRecord> records;
  for (int i = 0; i < 100; ++i) records.push_back(rec(i % 4, d(rng)));
  const SectionGrid grid{500.0, 2000.0};
  const auto once = clean(records, grid, hist);
  const auto twice = clean(once, grid, hist);
  for (std::size_t i = 0; i < once.size(); ++i) {
    REQUIRE(once[i].travel_time_s == twice[i].travel_time_s);
  }
}

TEST_CASE("clean: requires historical records") {
  REQUIRE_THROWS_AS(clean({rec(0, 100.0)}, SectionGrid{500.0, 500.0}, {}), DataError);
}
