#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/geo.hpp"
#include "bustt/io/csv.hpp"

namespace bustt::ingest {

struct GpsFix {
  std::string device_id;
  std::int64_t timestamp = 0;  // seconds since epoch
  GeoPoint pos;
};

struct GpsParseError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string reason;
};

struct GpsParseResult {
  std::vector<GpsFix> fixes;        // sorted by (device_id, timestamp), deduplicated
  std::vector<GpsParseError> errors;
  std::size_t rejected = 0;
};

/// Parse a `device_id,timestamp,lat,lon` CSV stream (header required).
///
/// Rows are sorted by (device_id, timestamp); duplicate timestamps per
/// device keep the first occurrence in file order. Malformed rows and
/// out-of-range coordinates are rejected record-by-record with the line
/// number, never aborting the parse.
inline GpsParseResult parse_gps(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("parse_gps: empty stream (header required)");
  {
    const auto header = io::split_csv_line(line);
    if (header.size() != 4 || header[0] != "device_id" || header[1] != "timestamp" ||
        header[2] != "lat" || header[3] != "lon") {
      throw DataError("parse_gps: expected header `device_id,timestamp,lat,lon`");
    }
  }

  GpsParseResult out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = io::split_csv_line(line);
    if (fields.size() != 4) {
      out.errors.push_back({lineno, "expected 4 fields, got " + std::to_string(fields.size())});
      ++out.rejected;
      continue;
    }
    const auto ts = io::parse_int(fields[1]);
    const auto lat = io::parse_double(fields[2]);
    const auto lon = io::parse_double(fields[3]);
    if (fields[0].empty() || !ts || !lat || !lon) {
      out.errors.push_back({lineno, "malformed field"});
      ++out.rejected;
      continue;
    }
    const GeoPoint p{*lat, *lon};
    if (!in_bounds(p)) {
      out.errors.push_back({lineno, "lat/lon out of range"});
      ++out.rejected;
      continue;
    }
    out.fixes.push_back(GpsFix{fields[0], *ts, p});
  }

  std::stable_sort(out.fixes.begin(), out.fixes.end(), [](const GpsFix& a, const GpsFix& b) {
    if (a.device_id != b.device_id) return a.device_id < b.device_id;
    return a.timestamp < b.timestamp;
  });
  const auto last = std::unique(out.fixes.begin(), out.fixes.end(),
                                [](const GpsFix& a, const GpsFix& b) {
                                  return a.device_id == b.device_id && a.timestamp == b.timestamp;
                                });
  out.fixes.erase(last, out.fixes.end());
  return out;
}

}  // namespace bustt::ingest
