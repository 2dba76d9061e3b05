#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/ingest/trips.hpp"
#include "bustt/stats/descriptive.hpp"

namespace bustt::ingest {

struct SectionGrid {
  double section_length_m = 500.0;
  double route_length_m = 28'000.0;

  int section_count() const {
    return static_cast<int>(std::ceil(route_length_m / section_length_m));
  }
};

struct TravelTimeRecord {
  std::string trip_id;
  std::int64_t service_day = 0;
  Direction direction = Direction::Onward;
  int section = 0;           // 0-based, along the trip's own direction
  double entry_time_s = 0;   // seconds-of-day at the entry boundary crossing
  double travel_time_s = 0;  // positive
};

namespace detail {

// Time at which the trip's cumulative distance reaches `target_m`,
// linearly interpolated between the bracketing fixes.
inline double crossing_time(const TripTrace& trip, double target_m) {
  const auto& cum = trip.cumulative_m;
  const auto it = std::lower_bound(cum.begin(), cum.end(), target_m);
  const auto i = static_cast<std::size_t>(it - cum.begin());
  const double ti = static_cast<double>(trip.fixes[i].timestamp);
  if (i == 0 || cum[i] == target_m) return ti;
  const double c0 = cum[i - 1], c1 = cum[i];
  const double t0 = static_cast<double>(trip.fixes[i - 1].timestamp);
  return t0 + (target_m - c0) / (c1 - c0) * (ti - t0);
}

}  // namespace detail

/// Cut a trip into per-section travel times.
///
/// Boundary crossing times come from linear interpolation of time
/// against cumulative distance; a section contributes a record only
/// when both its boundaries are crossed.
inline std::vector<TravelTimeRecord> sectionize(const TripTrace& trip, const SectionGrid& grid) {
  std::vector<TravelTimeRecord> out;
  if (trip.cumulative_m.empty() || trip.cumulative_m.back() <= 0.0) return out;
  const double total = trip.cumulative_m.back();
  const double day_base = static_cast<double>(trip.service_day) * 86400.0;

  double entry = detail::crossing_time(trip, 0.0);
  for (int k = 0; k < grid.section_count(); ++k) {
    const double exit_m = (static_cast<double>(k) + 1.0) * grid.section_length_m;
    if (exit_m > total) break;  // section never fully traversed
    const double exit = detail::crossing_time(trip, exit_m);
    TravelTimeRecord rec;
    rec.trip_id = trip.trip_id;
    rec.service_day = trip.service_day;
    rec.direction = trip.direction;
    rec.section = k;
    rec.entry_time_s = entry - day_base;
    rec.travel_time_s = exit - entry;
    out.push_back(std::move(rec));
    entry = exit;
  }
  return out;
}

struct CleanOptions {
  double free_flow_speed_kmh = 60.0;
  double percentile_cap = 0.95;
  std::size_t min_section_history = 20;  // below this, fall back to the global cap
};

/// Clamp travel times into [lower, upper] bounds.
///
/// lower = section_length / free-flow speed (30 s for 500 m at 60 km/h);
/// upper = the section's historical 95th percentile (linear interpolation
/// of order statistics), or the global 95th percentile for sections with
/// sparse history. Out-of-bound values are clamped, not dropped.
inline std::vector<TravelTimeRecord> clean(std::vector<TravelTimeRecord> records,
                                           const SectionGrid& grid,
                                           std::span<const TravelTimeRecord> historical,
                                           const CleanOptions& opt = {}) {
  if (historical.empty()) throw DataError("clean: historical records required");
  const double lower = grid.section_length_m / (opt.free_flow_speed_kmh / 3.6);

  std::map<int, std::vector<double>> per_section;
  std::vector<double> all;
  all.reserve(historical.size());
  for (const auto& r : historical) {
    per_section[r.section].push_back(r.travel_time_s);
    all.push_back(r.travel_time_s);
  }
  const double global_upper = stats::percentile_linear(all, opt.percentile_cap);

  std::map<int, double> upper;
  for (auto& [sec, vals] : per_section) {
    upper[sec] = vals.size() >= opt.min_section_history
                     ? stats::percentile_linear(vals, opt.percentile_cap)
                     : global_upper;
  }

  for (auto& r : records) {
    const auto it = upper.find(r.section);
    const double hi = it != upper.end() ? it->second : global_upper;
    r.travel_time_s = std::clamp(r.travel_time_s, lower, std::max(lower, hi));
  }
  return records;
}

}  // namespace bustt::ingest
