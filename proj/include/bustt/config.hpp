#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "bustt/geo.hpp"
#include "bustt/ingest/sections.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/ingest/trips.hpp"
#include "bustt/io/csv.hpp"
#include "bustt/stats/partial_corr.hpp"

namespace bustt {

/// Pipeline constants, auditable in one key=value file. Every physical
/// quantity must stay positive; significance in (0, 1).
struct PipelineConfig {
  double section_length = 500.0;   // m
  double route_length = 28'000.0;  // m (56 sections at the default length)
  double bin_duration = 3600.0;    // s
  int active_bins = 19;            // B
  int day_start_bin = 4;           // hour-of-day the first bin opens
  double free_flow_speed = 60.0;   // km/h
  double percentile_cap = 0.95;
  int min_section_history = 20;
  double significance = 0.05;
  std::string pc_tstat = "paper";  // paper | conventional
  std::string model = "sar";       // sar | nsar
  std::string domain = "log";      // log | linear
  double alpha = 0.5;              // exponential smoothing
  int train_days = 27;
  std::uint64_t seed = 7;
  double endpoint_radius = 250.0;  // m
  double gap_threshold = 600.0;    // s
  std::string direction = "onward";
  double origin_lat = 12.980;
  double origin_lon = 80.220;
  double terminus_lat = 13.232;
  double terminus_lon = 80.220;
  int nsar_min_days = 10;
  int order_cap = 5;

  static const std::vector<std::string>& valid_keys() {
    static const std::vector<std::string> keys = {
        "section_length", "route_length", "bin_duration", "active_bins", "day_start_bin",
        "free_flow_speed", "percentile_cap", "min_section_history", "significance",
        "pc_tstat", "model", "domain", "alpha", "train_days", "seed", "endpoint_radius",
        "gap_threshold", "direction", "origin_lat", "origin_lon", "terminus_lat",
        "terminus_lon", "nsar_min_days", "order_cap"};
    return keys;
  }

  void set(const std::string& key, const std::string& value) {
    auto num = [&](double& field) {
      const auto v = io::parse_double(value);
      if (!v) throw std::invalid_argument("config: non-numeric value for " + key);
      field = *v;
    };
    auto integer = [&](int& field) {
      const auto v = io::parse_int(value);
      if (!v) throw std::invalid_argument("config: non-integer value for " + key);
      field = static_cast<int>(*v);
    };
    if (key == "section_length") num(section_length);
    else if (key == "route_length") num(route_length);
    else if (key == "bin_duration") num(bin_duration);
    else if (key == "active_bins") integer(active_bins);
    else if (key == "day_start_bin") integer(day_start_bin);
    else if (key == "free_flow_speed") num(free_flow_speed);
    else if (key == "percentile_cap") num(percentile_cap);
    else if (key == "min_section_history") integer(min_section_history);
    else if (key == "significance") num(significance);
    else if (key == "pc_tstat") pc_tstat = value;
    else if (key == "model") model = value;
    else if (key == "domain") domain = value;
    else if (key == "alpha") num(alpha);
    else if (key == "train_days") integer(train_days);
    else if (key == "seed") {
      const auto v = io::parse_int(value);
      if (!v || *v < 0) throw std::invalid_argument("config: bad seed");
      seed = static_cast<std::uint64_t>(*v);
    } else if (key == "endpoint_radius") num(endpoint_radius);
    else if (key == "gap_threshold") num(gap_threshold);
    else if (key == "direction") direction = value;
    else if (key == "origin_lat") num(origin_lat);
    else if (key == "origin_lon") num(origin_lon);
    else if (key == "terminus_lat") num(terminus_lat);
    else if (key == "terminus_lon") num(terminus_lon);
    else if (key == "nsar_min_days") integer(nsar_min_days);
    else if (key == "order_cap") integer(order_cap);
    else {
      std::string keys;
      for (const auto& k : valid_keys()) {
        if (!keys.empty()) keys += ", ";
        keys += k;
      }
      throw std::invalid_argument("config: unknown key `" + key + "` (valid keys: " + keys + ")");
    }
  }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (v <= 0.0) throw std::invalid_argument(std::string("config: ") + name + " must be positive");
    };
    positive(section_length, "section_length");
    positive(route_length, "route_length");
    positive(bin_duration, "bin_duration");
    positive(free_flow_speed, "free_flow_speed");
    positive(alpha, "alpha");
    positive(endpoint_radius, "endpoint_radius");
    positive(gap_threshold, "gap_threshold");
    if (active_bins < 2) throw std::invalid_argument("config: active_bins must be >= 2");
    if (significance <= 0.0 || significance >= 1.0)
      throw std::invalid_argument("config: significance must be in (0, 1)");
    if (percentile_cap <= 0.0 || percentile_cap > 1.0)
      throw std::invalid_argument("config: percentile_cap must be in (0, 1]");
    if (alpha > 1.0) throw std::invalid_argument("config: alpha must be in (0, 1]");
    if (train_days < 1) throw std::invalid_argument("config: train_days must be >= 1");
    if (static_cast<double>(active_bins) * bin_duration > 86400.0)
      throw std::invalid_argument("config: active_bins * bin_duration exceeds a day");
    if (day_start_bin < 0 ||
        day_start_bin * 3600.0 + active_bins * bin_duration > 86400.0)
      throw std::invalid_argument("config: active window extends past midnight");
    if (pc_tstat != "paper" && pc_tstat != "conventional")
      throw std::invalid_argument("config: pc_tstat must be `paper` or `conventional`");
    if (model != "sar" && model != "nsar")
      throw std::invalid_argument("config: model must be `sar` or `nsar`");
    if (domain != "log" && domain != "linear")
      throw std::invalid_argument("config: domain must be `log` or `linear`");
    if (direction != "onward" && direction != "return")
      throw std::invalid_argument("config: direction must be `onward` or `return`");
  }

  /// Line-oriented `key = value` text; `#` starts a comment.
  void load(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto trim = [](std::string s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
        return s;
      };
      const std::string t = trim(line);
      if (t.empty()) continue;
      const std::size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    " is not `key = value`");
      set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    validate();
  }

  ingest::SectionGrid section_grid() const { return {section_length, route_length}; }
  ingest::BinGrid bin_grid() const { return {bin_duration, active_bins, day_start_bin}; }
  ingest::RouteEndpoints route_endpoints() const {
    return {{origin_lat, origin_lon}, {terminus_lat, terminus_lon}};
  }
  ingest::TripOptions trip_options() const { return {endpoint_radius, gap_threshold}; }
  stats::PcTstat pc_variant() const {
    return pc_tstat == "conventional" ? stats::PcTstat::Conventional : stats::PcTstat::Paper;
  }
  ingest::Direction direction_filter() const {
    return direction == "return" ? ingest::Direction::Return : ingest::Direction::Onward;
  }
};

}  // namespace bustt
