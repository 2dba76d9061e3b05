#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>

#include "bustt/geo.hpp"
#include "bustt/ingest/sections.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/io/csv.hpp"

namespace bustt::eval {

inline constexpr double kMetersPerDegreeLat =
    std::numbers::pi / 180.0 * kEarthRadiusM;  // exact along a meridian

/// Synthetic GPS world layout: a straight south-to-north route whose
/// haversine distance is linear in latitude, so section boundaries land
/// exactly where the generator puts them.
struct GpsFixtureSpec {
  GeoPoint origin{12.980, 80.220};
  double fix_interval_s = 5.0;
  double depart_offset_s = 60.0;    // after each bin start
  double terminus_overrun_m = 50.0; // physical terminus past the last boundary
  double dwell_s = 120.0;           // at the terminus before returning
  bool round_trips = true;
  std::string device = "bus-001";
  std::int64_t base_day = 19723;  // service date of day 0

  GeoPoint terminus(const ingest::SectionGrid& grid) const {
    const double x = grid.section_count() * grid.section_length_m + terminus_overrun_m;
    return {origin.lat + x / kMetersPerDegreeLat, origin.lon};
  }
};

namespace detail {

struct BusState {
  double x = 0.0;      // meters from the origin
  double t = 0.0;      // epoch seconds
  int dir = +1;        // +1 toward terminus
};

class FixtureWriter {
 public:
  FixtureWriter(std::ostream& os, std::span<const ingest::SectionSeries> series,
                const ingest::BinGrid& bins, const ingest::SectionGrid& grid,
                const GpsFixtureSpec& spec)
      : os_(os), series_(series), bins_(bins), grid_(grid), spec_(spec) {}

  void emit_fix(const BusState& b) {
    os_ << spec_.device << ',' << static_cast<std::int64_t>(std::llround(b.t)) << ','
        << io::format_double(spec_.origin.lat + b.x / kMetersPerDegreeLat) << ','
        << io::format_double(spec_.origin.lon) << '\n';
  }

  // speed for the section containing x, from the series cell at the
  // current bin (clamped into the active window)
  double speed_at(double x, double t, int day) const {
    const int count = grid_.section_count();
    int sec = static_cast<int>(std::floor(x / grid_.section_length_m));
    sec = std::clamp(sec, 0, count - 1);
    const double sod = t - static_cast<double>(spec_.base_day + day) * 86400.0;
    int bin = bins_.bin_of(sod);
    if (bin == 0) bin = sod < bins_.day_start_s() ? 1 : bins_.active_bins;
    const double tt = series_[static_cast<std::size_t>(sec)].cell(day, bin);
    return grid_.section_length_m / tt;
  }

  // advance to the next fix instant, integrating piecewise-constant
  // section speeds across boundaries
  void advance(BusState& b, double dt, int day) const {
    while (dt > 1e-12) {
      const double v = speed_at(b.dir > 0 ? b.x : std::max(0.0, b.x - 1e-9), b.t, day);
      const double len = grid_.section_length_m;
      double boundary;
      if (b.dir > 0) {
        boundary = (std::floor(b.x / len + 1e-12) + 1.0) * len;
      } else {
        boundary = (std::ceil(b.x / len - 1e-12) - 1.0) * len;
      }
      const double dist = std::fabs(boundary - b.x);
      const double need = dist / v;
      if (need > dt) {
        b.x += b.dir * v * dt;
        b.t += dt;
        return;
      }
      b.x = boundary;
      b.t += need;
      dt -= need;
    }
  }

  void run_trip(int day, double depart_epoch, bool returning) {
    const double terminus_x =
        grid_.section_count() * grid_.section_length_m + spec_.terminus_overrun_m;
    BusState b;
    b.dir = returning ? -1 : +1;
    b.x = returning ? terminus_x : 0.0;
    b.t = depart_epoch;
    emit_fix(b);
    const double target = returning ? 0.0 : terminus_x;
    // approach radius mirrors the trip detector's endpoint capture
    while (std::fabs(b.x - target) > 30.0) {
      advance(b, spec_.fix_interval_s, day);
      b.t = std::round(b.t);  // fixes land on the 5 s grid
      emit_fix(b);
      if (b.t > depart_epoch + 7200.0) break;  // runaway guard
    }
    last_arrival_ = b.t;
  }

  double last_arrival() const { return last_arrival_; }

 private:
  std::ostream& os_;
  std::span<const ingest::SectionSeries> series_;
  const ingest::BinGrid& bins_;
  const ingest::SectionGrid& grid_;
  const GpsFixtureSpec& spec_;
  double last_arrival_ = 0.0;
};

}  // namespace detail

/// Emit a GPS CSV whose ingest reproduces the given series shape: one
/// bus per (day, bin) departing the origin shortly after the bin opens,
/// optionally returning after a dwell. Intended for short routes where
/// a trip fits inside one bin.
inline void write_gps_fixture(std::ostream& os, std::span<const ingest::SectionSeries> series,
                              const ingest::BinGrid& bins, const ingest::SectionGrid& grid,
                              const GpsFixtureSpec& spec = {}) {
  os << "device_id,timestamp,lat,lon\n";
  detail::FixtureWriter w(os, series, bins, grid, spec);
  const int days = series.empty() ? 0 : series.front().days;
  for (int day = 0; day < days; ++day) {
    const double day_epoch = static_cast<double>(spec.base_day + day) * 86400.0;
    for (int bin = 1; bin <= bins.active_bins; ++bin) {
      const double depart = day_epoch + bins.bin_start_s(bin) + spec.depart_offset_s;
      w.run_trip(day, depart, false);
      if (spec.round_trips) {
        const double back = std::round(w.last_arrival() + spec.dwell_s);
        w.run_trip(day, back, true);
      }
    }
  }
}

}  // namespace bustt::eval
