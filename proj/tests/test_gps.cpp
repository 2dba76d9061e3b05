#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "bustt/errors.hpp"
#include "bustt/ingest/gps.hpp"

using namespace bustt;
using ingest::parse_gps;

TEST_CASE("parse_gps: header-only stream yields an empty list") {
  std::istringstream in("device_id,timestamp,lat,lon\n");
  const auto r = parse_gps(in);
  REQUIRE(r.fixes.empty());
  REQUIRE(r.rejected == 0);
}

TEST_CASE("parse_gps: one valid row round-trips") {
  std::istringstream in("device_id,timestamp,lat,lon\nbus-7,1700000000,13.05,80.2\n");
  const auto r = parse_gps(in);
  REQUIRE(r.fixes.size() == 1);
  REQUIRE(r.fixes[0].device_id == "bus-7");
  REQUIRE(r.fixes[0].timestamp == 1'700'000'000);
  REQUIRE(r.fixes[0].pos.lat == 13.05);
  REQUIRE(r.fixes[0].pos.lon == 80.2);
}

TEST_CASE("parse_gps: out-of-range latitude is rejected and counted") {
  std::istringstream in("device_id,timestamp,lat,lon\nbus-7,1700000000,91.0,80.2\n");
  const auto r = parse_gps(in);
  REQUIRE(r.fixes.empty());
  REQUIRE(r.rejected == 1);
  REQUIRE(r.errors.size() == 1);
  REQUIRE(r.errors[0].line == 2);
}

TEST_CASE("parse_gps: malformed rows carry their line number") {
  std::istringstream in(
      "device_id,timestamp,lat,lon\n"
      "bus-7,1700000000,13.05,80.2\n"
      "bus-7,not-a-number,13.05,80.2\n"
      "bus-7,1700000010\n"
      "bus-7,1700000020,13.06,80.2\n");
  const auto r = parse_gps(in);
  REQUIRE(r.fixes.size() == 2);
  REQUIRE(r.rejected == 2);
  REQUIRE(r.errors.size() == 2);
  REQUIRE(r.errors[0].line == 3);
  REQUIRE(r.errors[1].line == 4);
}

TEST_CASE("parse_gps: sorts by (device, timestamp) and keeps the first duplicate") {
  std::istringstream in(
      "device_id,timestamp,lat,lon\n"
      "b,1000,1.0,1.0\n"
      "a,2000,2.0,2.0\n"
      "a,1000,3.0,3.0\n"
      "a,1000,4.0,4.0\n");
  const auto r = parse_gps(in);
  REQUIRE(r.fixes.size() == 3);
  REQUIRE(r.fixes[0].device_id == "a");
  REQUIRE(r.fixes[0].timestamp == 1000);
  REQUIRE(r.fixes[0].pos.lat == 3.0);  // first occurrence in file order wins
  REQUIRE(r.fixes[1].timestamp == 2000);
  REQUIRE(r.fixes[2].device_id == "b");
}

TEST_CASE("parse_gps: missing or wrong header is a data error") {
  std::istringstream empty("");
  REQUIRE_THROWS_AS(parse_gps(empty), DataError);
  std::istringstream wrong("id,ts,lat,lon\n");
  REQUIRE_THROWS_AS(parse_gps(wrong), DataError);
}
