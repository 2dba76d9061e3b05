#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bustt/calendar.hpp"
#include "bustt/geo.hpp"
#include "bustt/ingest/gps.hpp"

namespace bustt::ingest {

enum class Direction { Onward, Return };

inline const char* to_string(Direction d) {
  return d == Direction::Onward ? "onward" : "return";
}

struct TripTrace {
  std::string trip_id;
  std::int64_t service_day = 0;  // days since epoch, from the first fix
  Direction direction = Direction::Onward;
  std::vector<GpsFix> fixes;
  std::vector<double> cumulative_m;  // running haversine distance per fix
};

struct RouteEndpoints {
  GeoPoint origin;
  GeoPoint terminus;
};

struct TripOptions {
  double endpoint_radius_m = 250.0;
  double gap_threshold_s = 600.0;
};

struct TripResult {
  std::vector<TripTrace> trips;
  std::size_t discarded = 0;  // fragments with fewer than 2 fixes
};

namespace detail {

inline void finish_trip(TripTrace&& trip, TripResult& out) {
  if (trip.fixes.size() < 2) {
    ++out.discarded;
    return;
  }
  trip.cumulative_m.resize(trip.fixes.size());
  trip.cumulative_m[0] = 0.0;
  for (std::size_t i = 1; i < trip.fixes.size(); ++i) {
    trip.cumulative_m[i] =
        trip.cumulative_m[i - 1] + haversine_m(trip.fixes[i - 1].pos, trip.fixes[i].pos);
  }
  trip.service_day = trip.fixes.front().timestamp / 86400;
  out.trips.push_back(std::move(trip));
}

}  // namespace detail

/// Segment one device's time-sorted fixes into trips.
///
/// A trip starts when the bus leaves an endpoint's capture radius while
/// moving toward the opposite endpoint, and ends when it enters the
/// opposite endpoint's radius. Direction is labeled by the starting
/// endpoint. Time gaps above gap_threshold_s split a trip into
/// fragments that keep the direction; fragments with fewer than two
/// fixes are discarded and counted.
inline TripResult identify_trips(std::span<const GpsFix> fixes, const RouteEndpoints& route,
                                 const TripOptions& opt = {}) {
  TripResult out;
  if (fixes.empty()) return out;
  const std::string& device = fixes.front().device_id;

  bool active = false;
  Direction dir = Direction::Onward;
  TripTrace cur;
  std::size_t seq = 0;

  auto open_trip = [&](Direction d, std::size_t first_fix) {
    cur = TripTrace{};
    cur.trip_id = device + ":" + std::to_string(seq++);
    cur.direction = d;
    cur.fixes.push_back(fixes[first_fix]);
    active = true;
    dir = d;
  };

  for (std::size_t i = 1; i < fixes.size(); ++i) {
    const GpsFix& prev = fixes[i - 1];
    const GpsFix& f = fixes[i];
    if (!active) {
      const double prev_orig = haversine_m(prev.pos, route.origin);
      const double prev_term = haversine_m(prev.pos, route.terminus);
      const double cur_orig = haversine_m(f.pos, route.origin);
      const double cur_term = haversine_m(f.pos, route.terminus);
      // departure: previous fix inside a zone, current fix outside it,
      // and the opposite endpoint getting closer
      if (prev_orig <= opt.endpoint_radius_m && cur_orig > opt.endpoint_radius_m &&
          cur_term < prev_term) {
        open_trip(Direction::Onward, i - 1);
        cur.fixes.push_back(f);
      } else if (prev_term <= opt.endpoint_radius_m && cur_term > opt.endpoint_radius_m &&
                 cur_orig < prev_orig) {
        open_trip(Direction::Return, i - 1);
        cur.fixes.push_back(f);
      }
      continue;
    }

    if (static_cast<double>(f.timestamp - prev.timestamp) > opt.gap_threshold_s) {
      detail::finish_trip(std::move(cur), out);
      open_trip(dir, i);
      continue;
    }
    cur.fixes.push_back(f);

    const GeoPoint& dest = dir == Direction::Onward ? route.terminus : route.origin;
    if (haversine_m(f.pos, dest) <= opt.endpoint_radius_m) {
      detail::finish_trip(std::move(cur), out);
      active = false;
    }
  }
  if (active) detail::finish_trip(std::move(cur), out);
  return out;
}

}  // namespace bustt::ingest
