#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/ingest/sections.hpp"
#include "bustt/io/csv.hpp"

namespace bustt::ingest {

/// Day-time binning. Bins are 1-based (1..active_bins), anchored at
/// day_start_hour so the active window excludes the night gap.
struct BinGrid {
  double bin_duration_s = 3600.0;
  int active_bins = 19;   // B
  int day_start_hour = 4; // active window 04:00-23:00 by default

  double day_start_s() const { return static_cast<double>(day_start_hour) * 3600.0; }

  /// 1-based bin containing a seconds-of-day instant, 0 when outside
  /// the active window.
  int bin_of(double seconds_of_day) const {
    const double off = seconds_of_day - day_start_s();
    if (off < 0.0) return 0;
    const int b = static_cast<int>(std::floor(off / bin_duration_s)) + 1;
    return b <= active_bins ? b : 0;
  }

  // start/end extrapolate past the active window arithmetically, which
  // multi-bin forecast traces rely on
  double bin_start_s(int bin) const {
    return day_start_s() + static_cast<double>(bin - 1) * bin_duration_s;
  }
  double bin_end_s(int bin) const { return bin_start_s(bin) + bin_duration_s; }
};

/// Per-section day x bin matrix of travel times (seconds). Complete
/// after binize; imputed cells are flagged.
struct SectionSeries {
  int section = 0;
  int days = 0;
  int bins = 0;
  std::vector<double> values;         // row-major day x bin, day-major concatenation
  std::vector<std::uint8_t> imputed;  // same layout

  double cell(int day, int bin) const {
    return values[static_cast<std::size_t>(day) * bins + (bin - 1)];
  }
  double& cell(int day, int bin) {
    return values[static_cast<std::size_t>(day) * bins + (bin - 1)];
  }
  bool is_imputed(int day, int bin) const {
    return imputed[static_cast<std::size_t>(day) * bins + (bin - 1)] != 0;
  }

  /// The date-ordered concatenation used by the sequential models.
  std::span<const double> concatenated() const { return values; }

  std::vector<double> log_values() const {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [](double v) { return std::log(v); });
    return out;
  }
};

struct BinizeResult {
  std::vector<SectionSeries> sections;  // ordered by section index
  std::size_t skipped = 0;              // records outside the active window
};

/// Aggregate cleaned records into per-section day x bin series.
///
/// Cell value = geometric mean of the records landing in that
/// (section, day, bin); empty cells are imputed with the geometric mean
/// of the same (section, bin) across the other days and flagged. A
/// (section, bin) with no observation on any day is a hard error.
inline BinizeResult binize(std::span<const TravelTimeRecord> records, const BinGrid& grid,
                           int section_count = -1) {
  if (records.empty()) throw DataError("binize: no records");

  std::vector<std::int64_t> days;
  int max_section = -1;
  for (const auto& r : records) {
    days.push_back(r.service_day);
    max_section = std::max(max_section, r.section);
  }
  std::sort(days.begin(), days.end());
  days.erase(std::unique(days.begin(), days.end()), days.end());
  std::map<std::int64_t, int> day_index;
  for (std::size_t i = 0; i < days.size(); ++i) day_index[days[i]] = static_cast<int>(i);

  const int n_sections = section_count > 0 ? section_count : max_section + 1;
  const int d = static_cast<int>(days.size());
  const int b = grid.active_bins;

  struct Acc {
    double log_sum = 0.0;
    int n = 0;
  };
  std::vector<Acc> acc(static_cast<std::size_t>(n_sections) * d * b);
  BinizeResult out;

  for (const auto& r : records) {
    if (r.section < 0 || r.section >= n_sections) {
      ++out.skipped;
      continue;
    }
    const int bin = grid.bin_of(r.entry_time_s);
    if (bin == 0) {
      ++out.skipped;
      continue;
    }
    if (r.travel_time_s <= 0.0) throw DataError("binize: non-positive travel time");
    auto& a = acc[(static_cast<std::size_t>(r.section) * d + day_index[r.service_day]) * b +
                  (bin - 1)];
    a.log_sum += std::log(r.travel_time_s);
    ++a.n;
  }

  out.sections.reserve(static_cast<std::size_t>(n_sections));
  for (int s = 0; s < n_sections; ++s) {
    SectionSeries ss;
    ss.section = s;
    ss.days = d;
    ss.bins = b;
    ss.values.assign(static_cast<std::size_t>(d) * b, 0.0);
    ss.imputed.assign(static_cast<std::size_t>(d) * b, 0);
    for (int bin = 1; bin <= b; ++bin) {
      double col_log_sum = 0.0;
      int col_n = 0;
      for (int day = 0; day < d; ++day) {
        const auto& a = acc[(static_cast<std::size_t>(s) * d + day) * b + (bin - 1)];
        if (a.n > 0) {
          col_log_sum += a.log_sum / a.n;
          ++col_n;
        }
      }
      if (col_n == 0) {
        throw DataError("binize: insufficient coverage (section " + std::to_string(s) +
                        ", bin " + std::to_string(bin) + " empty on every day)");
      }
      const double col_mean = std::exp(col_log_sum / col_n);
      for (int day = 0; day < d; ++day) {
        const auto& a = acc[(static_cast<std::size_t>(s) * d + day) * b + (bin - 1)];
        if (a.n > 0) {
          ss.cell(day, bin) = std::exp(a.log_sum / a.n);
        } else {
          ss.cell(day, bin) = col_mean;
          ss.imputed[static_cast<std::size_t>(day) * b + (bin - 1)] = 1;
        }
      }
    }
    out.sections.push_back(std::move(ss));
  }
  return out;
}

/// Textual series file: `section,day,bin,value,imputed` with header.
inline void write_series(std::ostream& os, std::span<const SectionSeries> sections) {
  os << "section,day,bin,value,imputed\n";
  for (const auto& s : sections) {
    for (int day = 0; day < s.days; ++day) {
      for (int bin = 1; bin <= s.bins; ++bin) {
        os << s.section << ',' << day << ',' << bin << ','
           << io::format_double(s.cell(day, bin)) << ','
           << (s.is_imputed(day, bin) ? 1 : 0) << '\n';
      }
    }
  }
}

inline std::vector<SectionSeries> read_series(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("read_series: empty stream");
  if (io::split_csv_line(line) != std::vector<std::string>{"section", "day", "bin", "value", "imputed"})
    throw DataError("read_series: expected header `section,day,bin,value,imputed`");

  struct Cell {
    int section, day, bin;
    double value;
    bool imputed;
  };
  std::vector<Cell> cells;
  int max_section = -1, max_day = -1, max_bin = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = io::split_csv_line(line);
    if (f.size() != 5) throw DataError("read_series: bad row at line " + std::to_string(lineno));
    const auto sec = io::parse_int(f[0]);
    const auto day = io::parse_int(f[1]);
    const auto bin = io::parse_int(f[2]);
    const auto val = io::parse_double(f[3]);
    const auto imp = io::parse_int(f[4]);
    if (!sec || !day || !bin || !val || !imp)
      throw DataError("read_series: bad field at line " + std::to_string(lineno));
    if (*val <= 0.0) throw DataError("read_series: non-positive value at line " + std::to_string(lineno));
    cells.push_back({static_cast<int>(*sec), static_cast<int>(*day), static_cast<int>(*bin),
                     *val, *imp != 0});
    max_section = std::max(max_section, static_cast<int>(*sec));
    max_day = std::max(max_day, static_cast<int>(*day));
    max_bin = std::max(max_bin, static_cast<int>(*bin));
  }
  if (cells.empty()) throw DataError("read_series: no data rows");

  std::vector<SectionSeries> out(static_cast<std::size_t>(max_section) + 1);
  for (int s = 0; s <= max_section; ++s) {
    out[static_cast<std::size_t>(s)].section = s;
    out[static_cast<std::size_t>(s)].days = max_day + 1;
    out[static_cast<std::size_t>(s)].bins = max_bin;
    out[static_cast<std::size_t>(s)].values.assign(
        static_cast<std::size_t>(max_day + 1) * max_bin, 0.0);
    out[static_cast<std::size_t>(s)].imputed.assign(
        static_cast<std::size_t>(max_day + 1) * max_bin, 0);
  }
  for (const auto& c : cells) {
    auto& s = out[static_cast<std::size_t>(c.section)];
    s.cell(c.day, c.bin) = c.value;
    s.imputed[static_cast<std::size_t>(c.day) * s.bins + (c.bin - 1)] = c.imputed ? 1 : 0;
  }
  for (const auto& s : out) {
    for (double v : s.values) {
      if (v <= 0.0) throw DataError("read_series: missing cell for section " +
                                    std::to_string(s.section));
    }
  }
  return out;
}

}  // namespace bustt::ingest
