#pragma once

#include <cmath>
#include <numbers>

namespace bustt {

/// Earth radius used throughout, meters.
inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

inline constexpr bool in_bounds(const GeoPoint& p) {
  return p.lat >= -90.0 && p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Great-circle distance in meters between two points (haversine form).
/// Symmetric and non-negative; exact zero for coincident inputs.
inline double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = deg2rad(a.lat);
  const double lat2 = deg2rad(b.lat);
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(1.0, h)));
}

}  // namespace bustt
