// bustt command-line pipeline: GPS ingest, diagnostics, model fitting,
// multi-section prediction, evaluation, and synthetic fixtures.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bustt/config.hpp"
#include "bustt/errors.hpp"
#include "bustt/eta.hpp"
#include "bustt/eval/gps_fixture.hpp"
#include "bustt/eval/harness.hpp"
#include "bustt/eval/synth.hpp"
#include "bustt/ingest/gps.hpp"
#include "bustt/ingest/sections.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/ingest/trips.hpp"
#include "bustt/io/csv.hpp"
#include "bustt/io/model_io.hpp"
#include "bustt/io/svg.hpp"
#include "bustt/nsar.hpp"
#include "bustt/sar.hpp"
#include "bustt/stats/adf.hpp"
#include "bustt/stats/correlogram.hpp"
#include "bustt/stats/lognormal.hpp"

namespace fs = std::filesystem;
using namespace bustt;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

struct Logger {
  LogLevel level = LogLevel::Info;
  template <typename... Args>
  void log(LogLevel at, Args&&... args) const {
    if (at > level) return;
    (std::cerr << ... << args) << '\n';
  }
  template <typename... Args> void error(Args&&... a) const { log(LogLevel::Error, "error: ", a...); }
  template <typename... Args> void warn(Args&&... a) const { log(LogLevel::Warn, "warn: ", a...); }
  template <typename... Args> void info(Args&&... a) const { log(LogLevel::Info, a...); }
};

Logger g_log;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value
  int jobs = 1;
  std::string log_level = "info";
};

PipelineConfig load_config(const CommonArgs& args) {
  PipelineConfig cfg;
  if (!args.config_path.empty()) {
    auto in = io::open_input(args.config_path);
    cfg.load(in);
  }
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--set expects key=value, got `" + kv + "`");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();

  if (args.log_level == "error") g_log.level = LogLevel::Error;
  else if (args.log_level == "warn") g_log.level = LogLevel::Warn;
  else if (args.log_level == "info") g_log.level = LogLevel::Info;
  else if (args.log_level == "debug") g_log.level = LogLevel::Debug;
  else throw std::invalid_argument("--log-level must be error|warn|info|debug");
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value configuration file");
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set seed=9");
  cmd->add_option("--jobs", args.jobs, "bound on worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--log-level", args.log_level, "error|warn|info|debug");
}

// output helper honoring `-` as stdout
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw DataError("cannot open output file: " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

double parse_clock(const std::string& hhmmss) {
  int h = 0, m = 0, s = 0;
  if (std::sscanf(hhmmss.c_str(), "%d:%d:%d", &h, &m, &s) != 3 || h < 0 || h > 23 || m < 0 ||
      m > 59 || s < 0 || s > 59)
    throw std::invalid_argument("expected HH:MM:SS, got `" + hhmmss + "`");
  return h * 3600.0 + m * 60.0 + s;
}

std::string format_clock(double seconds_of_day) {
  const int t = static_cast<int>(std::llround(seconds_of_day));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", t / 3600 % 24, t / 60 % 60, t % 60);
  return buf;
}

std::vector<ingest::SectionSeries> load_series_file(const std::string& path) {
  auto in = io::open_input(path);
  return ingest::read_series(in);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

int cmd_synth(const CommonArgs& common, const std::string& kind, int days, int sections,
              std::optional<int> bins_opt, std::optional<std::uint64_t> seed_opt, double sigma,
              double mu, const std::string& phi_csv, double seasonal_phi,
              double profile_amplitude, const std::string& out_path, const std::string& gps_path) {
  const PipelineConfig cfg = load_config(common);
  eval::SynthSpec spec;
  spec.kind = eval::synth_kind_from_string(kind);
  spec.days = days;
  spec.sections = sections;
  spec.bins = bins_opt.value_or(cfg.active_bins);
  spec.seed = seed_opt.value_or(cfg.seed);
  spec.sigma = sigma;
  spec.mu = mu;
  spec.seasonal_phi = seasonal_phi;
  spec.phi.clear();
  for (const auto& f : io::split_csv_line(phi_csv)) {
    const auto v = io::parse_double(f);
    if (!v) throw std::invalid_argument("--phi expects a comma-separated number list");
    spec.phi.push_back(*v);
  }
  if (profile_amplitude != 0.0) {
    spec.bin_profile.resize(static_cast<std::size_t>(spec.bins));
    for (int b = 1; b <= spec.bins; ++b)
      spec.bin_profile[static_cast<std::size_t>(b - 1)] =
          profile_amplitude * std::sin(2.0 * std::numbers::pi * (b - 1) / spec.bins);
  }

  const auto series = eval::synth_generate(spec);
  OutStream out(out_path);
  ingest::write_series(out.get(), series);
  g_log.info("synth: wrote ", series.size(), " sections x ", spec.days, " days x ", spec.bins,
             " bins (seed ", spec.seed, ")");

  if (!gps_path.empty()) {
    eval::GpsFixtureSpec gspec;
    gspec.origin = {cfg.origin_lat, cfg.origin_lon};
    ingest::SectionGrid grid{cfg.section_length, cfg.section_length * spec.sections};
    OutStream gps(gps_path);
    eval::write_gps_fixture(gps.get(), series, cfg.bin_grid(), grid, gspec);
    g_log.info("synth: wrote GPS fixture to ", gps_path);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

int cmd_ingest(const CommonArgs& common, const std::string& input, const std::string& trips_path,
               const std::string& series_path) {
  const PipelineConfig cfg = load_config(common);
  auto in = io::open_input(input);
  auto parsed = ingest::parse_gps(in);
  g_log.info("ingest: ", parsed.fixes.size(), " fixes, ", parsed.rejected, " rejected rows");
  for (const auto& e : parsed.errors) g_log.warn("line ", e.line, ": ", e.reason);

  const auto route = cfg.route_endpoints();
  const auto topt = cfg.trip_options();
  std::vector<ingest::TripTrace> trips;
  std::size_t discarded = 0;
  for (std::size_t i = 0; i < parsed.fixes.size();) {
    std::size_t j = i;
    while (j < parsed.fixes.size() && parsed.fixes[j].device_id == parsed.fixes[i].device_id) ++j;
    auto res = ingest::identify_trips(
        std::span<const ingest::GpsFix>(parsed.fixes.data() + i, j - i), route, topt);
    discarded += res.discarded;
    for (auto& t : res.trips) trips.push_back(std::move(t));
    i = j;
  }
  g_log.info("ingest: ", trips.size(), " trips (", discarded, " fragments discarded)");
  if (trips.empty()) throw DataError("ingest: no trips found");

  const auto grid = cfg.section_grid();
  ingest::CleanOptions copt{cfg.free_flow_speed, cfg.percentile_cap,
                            static_cast<std::size_t>(cfg.min_section_history)};
  std::vector<ingest::TravelTimeRecord> onward, back;
  for (const auto& t : trips) {
    for (auto& r : ingest::sectionize(t, grid)) {
      (r.direction == ingest::Direction::Onward ? onward : back).push_back(std::move(r));
    }
  }
  if (!onward.empty()) onward = ingest::clean(std::move(onward), grid, onward, copt);
  if (!back.empty()) back = ingest::clean(std::move(back), grid, back, copt);

  {
    OutStream out(trips_path);
    out.get() << "trip_id,date,direction,section,entry_time,travel_time\n";
    for (const auto* bucket : {&onward, &back}) {
      for (const auto& r : *bucket) {
        out.get() << r.trip_id << ',' << format_day(r.service_day) << ','
                  << ingest::to_string(r.direction) << ',' << r.section << ','
                  << io::format_double(r.entry_time_s) << ','
                  << io::format_double(r.travel_time_s) << '\n';
      }
    }
  }

  const auto& selected = cfg.direction_filter() == ingest::Direction::Onward ? onward : back;
  if (selected.empty()) throw DataError("ingest: no records in direction " + cfg.direction);
  auto binned = ingest::binize(selected, cfg.bin_grid(), grid.section_count());
  g_log.info("ingest: ", binned.skipped, " records outside the active window");
  OutStream out(series_path);
  ingest::write_series(out.get(), binned.sections);
  return 0;
}

// ---------------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------------

int cmd_diagnose(const CommonArgs& common, const std::string& series_path,
                 const std::string& out_dir, const std::string& svg_dir, int max_lag) {
  const PipelineConfig cfg = load_config(common);
  const auto sections = load_series_file(series_path);
  fs::create_directories(out_dir);
  if (!svg_dir.empty()) fs::create_directories(svg_dir);

  std::ofstream corr(fs::path(out_dir) / "correlogram.csv");
  std::ofstream tests(fs::path(out_dir) / "tests.csv");
  corr << "section,lag,acf,pacf\n";
  tests << "section,test,statistic,p_value,decision\n";

  for (const auto& s : sections) {
    const auto logs = s.log_values();
    const int lags = std::min<int>(max_lag, static_cast<int>(logs.size()) - 1);
    const auto a = stats::acf(logs, lags);
    const auto p = stats::pacf(logs, lags);
    for (int l = 0; l <= lags; ++l) {
      corr << s.section << ',' << l << ',' << io::format_double(a.at(l)) << ','
           << io::format_double(p.at(l)) << '\n';
    }

    // K-S on the raw (non-imputed) sample; ADF on the log concatenation
    std::vector<double> sample;
    for (int day = 0; day < s.days; ++day) {
      for (int bin = 1; bin <= s.bins; ++bin) {
        if (!s.is_imputed(day, bin)) sample.push_back(s.cell(day, bin));
      }
    }
    const auto ks = stats::ks_lognormal(sample, cfg.significance);
    tests << s.section << ",ks_lognormal," << io::format_double(ks.statistic) << ','
          << io::format_double(ks.p_value) << ',' << (ks.reject_null ? "reject" : "retain")
          << '\n';
    const auto adf = stats::adf(logs, cfg.significance);
    tests << s.section << ",adf," << io::format_double(adf.statistic) << ','
          << io::format_double(adf.p_value) << ',' << (adf.reject_null ? "reject" : "retain")
          << '\n';

    if (!svg_dir.empty()) {
      std::ofstream svg(fs::path(svg_dir) / ("correlogram_" + std::to_string(s.section) + ".svg"));
      io::write_correlogram_svg(svg, a.values, p.values, a.band,
                                "section " + std::to_string(s.section));
    }
  }
  g_log.info("diagnose: wrote reports for ", sections.size(), " sections to ", out_dir);
  return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

int cmd_fit(const CommonArgs& common, const std::string& series_path, const std::string& out_dir) {
  const PipelineConfig cfg = load_config(common);
  const auto sections = load_series_file(series_path);
  fs::create_directories(out_dir);
  const auto domain = cfg.domain == "linear" ? sar::Domain::Linear : sar::Domain::Log;

  std::vector<sar::SarModel> sar_models(sections.size());
  std::vector<nsar::NsarModel> nsar_models(sections.size());
  nsar::LearnOptions lo;
  lo.significance = cfg.significance;
  lo.pc_variant = cfg.pc_variant();
  lo.min_days = cfg.nsar_min_days;

  eval::run_parallel(static_cast<int>(sections.size()), common.jobs, [&](int i) {
    const auto& s = sections[static_cast<std::size_t>(i)];
    std::vector<double> data(s.values.begin(), s.values.end());
    if (domain == sar::Domain::Log) {
      for (auto& v : data) v = std::log(v);
    }
    auto fit = sar::fit_section(data, s.bins, cfg.significance, cfg.order_cap);
    fit.model.section = s.section;
    fit.model.domain = domain;
    sar_models[static_cast<std::size_t>(i)] = std::move(fit.model);

    auto matrix = nsar::TrainingMatrix::from_series(s, domain);
    auto model = nsar::learn_all(matrix, lo);
    model.section = s.section;
    model.domain = domain;
    nsar_models[static_cast<std::size_t>(i)] = std::move(model);
  });

  {
    auto out = io::open_output((fs::path(out_dir) / "sar_models.csv").string());
    io::save_sar_models(out, sar_models);
  }
  {
    auto out = io::open_output((fs::path(out_dir) / "nsar_models.csv").string());
    io::save_nsar_models(out, nsar_models);
  }
  g_log.info("fit: persisted ", sections.size(), " sections (both families) to ", out_dir);
  return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

int cmd_predict(const CommonArgs& common, int at_section, const std::string& time_str,
                int to_stop, const std::string& model_kind, const std::string& series_path,
                const std::string& models_dir, const std::string& realtime_path,
                const std::string& out_path) {
  const PipelineConfig cfg = load_config(common);
  const auto bins = cfg.bin_grid();
  const double t_cur = parse_clock(time_str);
  const int j = bins.bin_of(t_cur);
  if (j == 0) throw DataError("predict: query time outside the active window");

  const auto sections = load_series_file(series_path);
  const int section_count = static_cast<int>(sections.size());

  std::vector<std::unique_ptr<eta::TemporalPredictor>> owners(
      static_cast<std::size_t>(section_count));
  if (model_kind == "sar") {
    auto in = io::open_input((fs::path(models_dir) / "sar_models.csv").string());
    for (auto& m : io::load_sar_models(in)) {
      if (m.section < 0 || m.section >= section_count) continue;
      const auto& s = sections[static_cast<std::size_t>(m.section)];
      const int idx = m.section;
      owners[static_cast<std::size_t>(idx)] =
          std::make_unique<eta::SarPredictor>(std::move(m), s.log_values());
    }
  } else if (model_kind == "nsar") {
    auto in = io::open_input((fs::path(models_dir) / "nsar_models.csv").string());
    for (auto& m : io::load_nsar_models(in, sar::Domain::Log)) {
      if (m.section < 0 || m.section >= section_count) continue;
      const int idx = m.section;
      owners[static_cast<std::size_t>(idx)] = std::make_unique<eta::NsarPredictor>(std::move(m));
    }
  } else {
    throw std::invalid_argument("--model must be sar or nsar");
  }

  eta::RealtimeStore store(section_count, bins.active_bins);
  store.set_current_bin(j);
  if (!realtime_path.empty()) {
    auto in = io::open_input(realtime_path);
    std::string line;
    if (!std::getline(in, line) ||
        io::split_csv_line(line) != std::vector<std::string>{"section", "bin", "travel_time"})
      throw DataError("realtime file: expected header `section,bin,travel_time`");
    std::size_t rejected = 0, lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line == "\r") continue;
      const auto f = io::split_csv_line(line);
      const auto sec = f.size() == 3 ? io::parse_int(f[0]) : std::nullopt;
      const auto bin = f.size() == 3 ? io::parse_int(f[1]) : std::nullopt;
      const auto val = f.size() == 3 ? io::parse_double(f[2]) : std::nullopt;
      if (!sec || !bin || !val)
        throw DataError("realtime file: bad row at line " + std::to_string(lineno));
      if (!store.add(static_cast<int>(*sec), static_cast<int>(*bin), *val)) ++rejected;
    }
    if (rejected > 0) g_log.warn("predict: rejected ", rejected, " future-binned realtime records");
  }

  std::vector<const eta::TemporalPredictor*> predictors(owners.size());
  for (std::size_t i = 0; i < owners.size(); ++i) predictors[i] = owners[i].get();

  const auto result =
      eta::eta_to_stop(predictors, store.snapshot(), at_section, t_cur, to_stop, bins);

  OutStream out(out_path);
  out.get() << "k,section,futstep,exp_bin,pred_s,cum_exit\n";
  for (const auto& step : result.steps) {
    out.get() << step.k << ',' << step.section << ',' << step.fut_step << ',' << step.exp_time_bin
              << ',' << io::format_double(step.predicted_s) << ','
              << io::format_double(step.cum_exit_s) << '\n';
  }
  g_log.info("predict: arrival at section ", to_stop, " at ", format_clock(result.arrival_time_s),
             " (bin ", result.start_bin, " query)");
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const CommonArgs& common, const std::string& series_path,
                 const std::string& methods_csv, const std::vector<std::string>& external_paths,
                 const std::string& out_path) {
  const PipelineConfig cfg = load_config(common);
  const auto sections = load_series_file(series_path);

  std::vector<eval::Method> methods;
  for (const auto& name : io::split_csv_line(methods_csv)) {
    if (!name.empty()) methods.push_back(eval::method_from_string(name));
  }
  std::vector<eval::ExternalPredictions> external;
  for (const auto& path : external_paths) {
    auto in = io::open_input(path);
    for (auto& e : eval::read_external_predictions(in)) external.push_back(std::move(e));
  }

  eval::EvalOptions opt;
  opt.train_days = cfg.train_days;
  opt.alpha = cfg.alpha;
  opt.significance = cfg.significance;
  opt.pc_variant = cfg.pc_variant();
  opt.order_cap = cfg.order_cap;
  opt.nsar_min_days = cfg.nsar_min_days;
  opt.jobs = common.jobs;

  const auto reports = eval::evaluate_split(sections, methods, opt, external);
  OutStream out(out_path);
  eval::write_reports(out.get(), reports);
  g_log.info("evaluate: ", reports.size(), " report rows");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"section travel-time modeling and bus arrival prediction"};
  app.require_subcommand(1);

  CommonArgs common;

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic fixtures");
  std::string synth_kind = "sar_multiplicative";
  int synth_days = 34, synth_sections = 1;
  std::optional<int> synth_bins;
  std::optional<std::uint64_t> synth_seed;
  double synth_sigma = 0.3, synth_mu = std::log(60.0), synth_seasonal = 0.3;
  double synth_profile = 0.0;
  std::string synth_phi = "0.5,0.2", synth_out = "series.csv", synth_gps;
  add_common(synth, common);
  synth->add_option("--kind", synth_kind,
                    "sar_multiplicative|sar_additive|nsar|lognormal_iid|random_walk");
  synth->add_option("--days", synth_days);
  synth->add_option("--sections", synth_sections);
  synth->add_option("--bins", synth_bins);
  synth->add_option("--seed", synth_seed);
  synth->add_option("--sigma", synth_sigma, "innovation stddev (log domain)");
  synth->add_option("--mu", synth_mu, "log-domain level");
  synth->add_option("--phi", synth_phi, "comma-separated non-seasonal coefficients");
  synth->add_option("--seasonal-phi", synth_seasonal);
  synth->add_option("--profile-amplitude", synth_profile, "per-bin sinusoidal mean profile");
  synth->add_option("--out", synth_out, "series file (- for stdout)");
  synth->add_option("--gps", synth_gps, "also write a GPS-level fixture CSV");

  // ingest
  auto* ing = app.add_subcommand("ingest", "GPS CSV -> trips + per-section series");
  std::string ing_input, ing_trips = "trips.csv", ing_series = "series.csv";
  add_common(ing, common);
  ing->add_option("--input", ing_input, "GPS CSV (device_id,timestamp,lat,lon)")->required();
  ing->add_option("--trips", ing_trips, "output trips CSV");
  ing->add_option("--series", ing_series, "output series file");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "K-S / ACF / PACF / ADF reports");
  std::string diag_series, diag_out = "reports", diag_svg;
  int diag_lag = 25;
  add_common(diag, common);
  diag->add_option("--series", diag_series)->required();
  diag->add_option("--out-dir", diag_out);
  diag->add_option("--svg", diag_svg, "also emit per-section correlogram SVGs here");
  diag->add_option("--max-lag", diag_lag);

  // fit
  auto* fit = app.add_subcommand("fit", "fit SAR + NS-AR models per section");
  std::string fit_series, fit_out = "models";
  add_common(fit, common);
  fit->add_option("--series", fit_series)->required();
  fit->add_option("--out-dir", fit_out);

  // predict
  auto* pred = app.add_subcommand("predict", "multi-section-ahead arrival prediction");
  int pred_at = 0, pred_stop = 0;
  std::string pred_time, pred_model = "sar", pred_series, pred_models = "models", pred_rt,
              pred_out = "-";
  add_common(pred, common);
  pred->add_option("--at", pred_at, "section the bus is leaving")->required();
  pred->add_option("--time", pred_time, "HH:MM:SS")->required();
  pred->add_option("--to-stop", pred_stop, "stop's section")->required();
  pred->add_option("--model", pred_model, "sar|nsar");
  pred->add_option("--series", pred_series, "training series file")->required();
  pred->add_option("--models", pred_models, "directory holding fitted model files");
  pred->add_option("--realtime", pred_rt, "today's observations CSV (section,bin,travel_time)");
  pred->add_option("--out", pred_out, "trace output (- for stdout)");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "train/test harness with baselines");
  std::string ev_series, ev_methods = "sar,nsar,hist,expsmooth", ev_out = "report.csv";
  std::vector<std::string> ev_external;
  add_common(ev, common);
  ev->add_option("--series", ev_series)->required();
  ev->add_option("--methods", ev_methods, "comma list (sar,nsar,sar_gaussian,...)");
  ev->add_option("--external", ev_external, "external predictions CSV, repeatable");
  ev->add_option("--out", ev_out, "report CSV (- for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (synth->parsed())
      return cmd_synth(common, synth_kind, synth_days, synth_sections, synth_bins, synth_seed,
                       synth_sigma, synth_mu, synth_phi, synth_seasonal, synth_profile, synth_out,
                       synth_gps);
    if (ing->parsed()) return cmd_ingest(common, ing_input, ing_trips, ing_series);
    if (diag->parsed()) return cmd_diagnose(common, diag_series, diag_out, diag_svg, diag_lag);
    if (fit->parsed()) return cmd_fit(common, fit_series, fit_out);
    if (pred->parsed())
      return cmd_predict(common, pred_at, pred_time, pred_stop, pred_model, pred_series,
                         pred_models, pred_rt, pred_out);
    if (ev->parsed()) return cmd_evaluate(common, ev_series, ev_methods, ev_external, ev_out);
  } catch (const std::invalid_argument& e) {
    g_log.error(e.what());
    return 1;
  } catch (const DataError& e) {
    g_log.error(e.what());
    return 2;
  } catch (const std::exception& e) {
    g_log.error(e.what());
    return 2;
  }
  return 1;
}
