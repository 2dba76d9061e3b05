#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/eval/baselines.hpp"
#include "bustt/eval/metrics.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/io/csv.hpp"
#include "bustt/nsar.hpp"
#include "bustt/sar.hpp"

namespace bustt::eval {

enum class Method {
  SarLognormal,
  SarGaussian,
  NsarLognormal,
  NsarGaussian,
  HistoricalAverage,
  ExpSmoothing,
};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::SarLognormal: return "sar_lognormal";
    case Method::SarGaussian: return "sar_gaussian";
    case Method::NsarLognormal: return "nsar_lognormal";
    case Method::NsarGaussian: return "nsar_gaussian";
    case Method::HistoricalAverage: return "historical_average";
    case Method::ExpSmoothing: return "exp_smoothing";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "sar" || s == "sar_lognormal") return Method::SarLognormal;
  if (s == "sar_gaussian") return Method::SarGaussian;
  if (s == "nsar" || s == "nsar_lognormal") return Method::NsarLognormal;
  if (s == "nsar_gaussian") return Method::NsarGaussian;
  if (s == "hist" || s == "historical_average") return Method::HistoricalAverage;
  if (s == "expsmooth" || s == "exp_smoothing") return Method::ExpSmoothing;
  throw std::invalid_argument("unknown method: " + s);
}

struct MetricReport {
  std::string method;
  std::string level;  // section | day | day_total | overall
  std::string key;
  double mape = 0.0;
  double mae = 0.0;
  std::size_t n = 0;
};

/// Third-party predictions keyed by (day, section, bin).
struct ExternalPredictions {
  std::string name;
  std::map<std::tuple<int, int, int>, double> cells;
};

/// `method,day,section,bin,predicted` exchange format.
inline std::vector<ExternalPredictions> read_external_predictions(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("external predictions: empty stream");
  if (io::split_csv_line(line) !=
      std::vector<std::string>{"method", "day", "section", "bin", "predicted"})
    throw DataError("external predictions: expected header `method,day,section,bin,predicted`");
  std::map<std::string, ExternalPredictions> by_name;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto f = io::split_csv_line(line);
    const auto day = f.size() == 5 ? io::parse_int(f[1]) : std::nullopt;
    const auto sec = f.size() == 5 ? io::parse_int(f[2]) : std::nullopt;
    const auto bin = f.size() == 5 ? io::parse_int(f[3]) : std::nullopt;
    const auto val = f.size() == 5 ? io::parse_double(f[4]) : std::nullopt;
    if (!day || !sec || !bin || !val)
      throw DataError("external predictions: bad row at line " + std::to_string(lineno));
    auto& e = by_name[f[0]];
    e.name = f[0];
    e.cells[{static_cast<int>(*day), static_cast<int>(*sec), static_cast<int>(*bin)}] = *val;
  }
  std::vector<ExternalPredictions> out;
  out.reserve(by_name.size());
  for (auto& [_, e] : by_name) out.push_back(std::move(e));
  return out;
}

struct EvalOptions {
  int train_days = 27;
  double alpha = 0.5;  // exponential smoothing
  double significance = 0.05;
  stats::PcTstat pc_variant = stats::PcTstat::Paper;
  int order_cap = 5;
  int nsar_min_days = 10;
  int jobs = 1;
};

namespace detail {

constexpr double kNoPred = std::numeric_limits<double>::quiet_NaN();

// One-step-ahead predictions for every test cell of one section,
// day-major (test_days x bins). Conditioning uses actual past cells
// (train + earlier test), never refitting.
inline std::vector<double> run_method(Method method, const ingest::SectionSeries& s,
                                      const EvalOptions& opt) {
  const int test_days = s.days - opt.train_days;
  const int b = s.bins;
  std::vector<double> pred(static_cast<std::size_t>(test_days) * b, kNoPred);

  switch (method) {
    case Method::SarLognormal:
    case Method::SarGaussian: {
      const bool log_domain = method == Method::SarLognormal;
      std::vector<double> all(s.values.begin(), s.values.end());
      if (log_domain) {
        for (auto& v : all) v = std::log(v);
      }
      const std::span<const double> train(all.data(),
                                          static_cast<std::size_t>(opt.train_days) * b);
      auto fit = sar::fit_section(train, b, opt.significance, opt.order_cap);
      fit.model.domain = log_domain ? sar::Domain::Log : sar::Domain::Linear;
      for (int td = 0; td < test_days; ++td) {
        for (int bin = 1; bin <= b; ++bin) {
          const std::size_t g = (static_cast<std::size_t>(opt.train_days) + td) * b + (bin - 1);
          const std::span<const double> hist(all.data(), g);
          const double f = sar::forecast(fit.model, hist, 1).back();
          pred[static_cast<std::size_t>(td) * b + (bin - 1)] =
              log_domain ? std::exp(f) : std::max(f, 1e-9);
        }
      }
      break;
    }
    case Method::NsarLognormal:
    case Method::NsarGaussian: {
      const bool log_domain = method == Method::NsarLognormal;
      const auto domain = log_domain ? sar::Domain::Log : sar::Domain::Linear;
      nsar::LearnOptions lo;
      lo.significance = opt.significance;
      lo.pc_variant = opt.pc_variant;
      lo.min_days = opt.nsar_min_days;
      auto matrix = nsar::TrainingMatrix::from_series(s, domain, opt.train_days);
      auto model = nsar::learn_all(matrix, lo);
      model.domain = domain;
      model.section = s.section;
      for (int td = 0; td < test_days; ++td) {
        const int day = opt.train_days + td;
        std::vector<double> same_day;
        same_day.reserve(static_cast<std::size_t>(b));
        for (int bin = 1; bin <= b; ++bin) {
          const double f = nsar::forecast(model, same_day, bin);
          pred[static_cast<std::size_t>(td) * b + (bin - 1)] =
              log_domain ? std::exp(f) : std::max(f, 1e-9);
          const double v = s.cell(day, bin);
          same_day.push_back(log_domain ? std::log(v) : v);
        }
      }
      break;
    }
    case Method::HistoricalAverage: {
      for (int bin = 1; bin <= b; ++bin) {
        const double avg = historical_average(s, opt.train_days, bin);
        for (int td = 0; td < test_days; ++td)
          pred[static_cast<std::size_t>(td) * b + (bin - 1)] = avg;
      }
      break;
    }
    case Method::ExpSmoothing: {
      ExpSmoother sm(opt.alpha);
      for (int day = 0; day < s.days; ++day) {
        for (int bin = 1; bin <= b; ++bin) {
          if (day >= opt.train_days && sm.seeded()) {
            pred[static_cast<std::size_t>(day - opt.train_days) * b + (bin - 1)] = sm.estimate();
          }
          sm.observe(s.cell(day, bin));
        }
      }
      break;
    }
  }
  return pred;
}

struct Group {
  std::vector<double> actual;
  std::vector<double> predicted;
};

}  // namespace detail

/// Runs fn(0..count-1) over at most `jobs` threads. Sections are
/// independent, so per-index outputs stay deterministic.
inline void run_parallel(int count, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  const int workers = std::min(jobs, count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Train/test harness: fits every method on the first train_days,
/// produces one-step predictions over the remaining days for every
/// (section, bin), and aggregates MAPE/MAE per section, per day (cell
/// average and day-total variants, both labeled) and overall. Imputed
/// cells never score.
inline std::vector<MetricReport> evaluate_split(
    std::span<const ingest::SectionSeries> data, std::span<const Method> methods,
    const EvalOptions& opt = {}, std::span<const ExternalPredictions> external = {}) {
  if (data.empty()) throw DataError("evaluate_split: no sections");
  const int days = data.front().days;
  const int b = data.front().bins;
  for (const auto& s : data) {
    if (s.days != days || s.bins != b)
      throw DataError("evaluate_split: inconsistent section shapes");
  }
  if (days <= opt.train_days)
    throw DataError("evaluate_split: insufficient days (" + std::to_string(days) +
                    " total, train " + std::to_string(opt.train_days) + ")");
  const int test_days = days - opt.train_days;

  std::vector<MetricReport> reports;

  struct NamedPreds {
    std::string name;
    // [section][test-cell] predictions; NaN = not predicted
    std::vector<std::vector<double>> per_section;
  };
  std::vector<NamedPreds> runs;
  for (const Method m : methods) {
    NamedPreds np;
    np.name = to_string(m);
    np.per_section.resize(data.size());
    run_parallel(static_cast<int>(data.size()), opt.jobs, [&](int i) {
      np.per_section[static_cast<std::size_t>(i)] =
          detail::run_method(m, data[static_cast<std::size_t>(i)], opt);
    });
    runs.push_back(std::move(np));
  }
  for (const auto& ext : external) {
    NamedPreds np;
    np.name = ext.name;
    np.per_section.assign(data.size(),
                          std::vector<double>(static_cast<std::size_t>(test_days) * b,
                                              detail::kNoPred));
    for (const auto& [key, value] : ext.cells) {
      const auto [day, section, bin] = key;
      const int td = day - opt.train_days;
      if (section < 0 || section >= static_cast<int>(data.size())) continue;
      if (td < 0 || td >= test_days || bin < 1 || bin > b) continue;
      np.per_section[static_cast<std::size_t>(section)]
                    [static_cast<std::size_t>(td) * b + (bin - 1)] = value;
    }
    runs.push_back(std::move(np));
  }

  for (const auto& run : runs) {
    std::map<std::string, detail::Group> by_section;
    std::map<int, detail::Group> by_day;
    detail::Group overall;
    for (std::size_t si = 0; si < data.size(); ++si) {
      const auto& s = data[si];
      const auto& preds = run.per_section[si];
      for (int td = 0; td < test_days; ++td) {
        const int day = opt.train_days + td;
        for (int bin = 1; bin <= b; ++bin) {
          if (s.is_imputed(day, bin)) continue;  // imputed actuals never score
          const double p = preds[static_cast<std::size_t>(td) * b + (bin - 1)];
          if (std::isnan(p)) continue;
          const double a = s.cell(day, bin);
          by_section[std::to_string(s.section)].actual.push_back(a);
          by_section[std::to_string(s.section)].predicted.push_back(p);
          by_day[day].actual.push_back(a);
          by_day[day].predicted.push_back(p);
          overall.actual.push_back(a);
          overall.predicted.push_back(p);
        }
      }
    }
    auto emit = [&](const std::string& level, const std::string& key, const detail::Group& g) {
      if (g.actual.empty()) return;
      reports.push_back(MetricReport{run.name, level, key, mape(g.actual, g.predicted),
                                     mae(g.actual, g.predicted), g.actual.size()});
    };
    for (const auto& [key, g] : by_section) emit("section", key, g);
    for (const auto& [day, g] : by_day) {
      emit("day", std::to_string(day), g);
      // day-total variant: error of the summed day travel time
      double sa = 0.0, sp = 0.0;
      for (std::size_t i = 0; i < g.actual.size(); ++i) {
        sa += g.actual[i];
        sp += g.predicted[i];
      }
      reports.push_back(MetricReport{run.name, "day_total", std::to_string(day),
                                     100.0 * std::fabs(sa - sp) / sa, std::fabs(sa - sp),
                                     g.actual.size()});
    }
    emit("overall", "all", overall);
  }
  return reports;
}

/// `method,level,key,mape,mae,n` report emission.
inline void write_reports(std::ostream& os, std::span<const MetricReport> reports) {
  os << "method,level,key,mape,mae,n\n";
  for (const auto& r : reports) {
    os << r.method << ',' << r.level << ',' << r.key << ',' << io::format_double(r.mape) << ','
       << io::format_double(r.mae) << ',' << r.n << '\n';
  }
}

inline double overall_mape(std::span<const MetricReport> reports, const std::string& method) {
  for (const auto& r : reports) {
    if (r.method == method && r.level == "overall") return r.mape;
  }
  throw DataError("overall_mape: method not found in reports: " + method);
}

}  // namespace bustt::eval
