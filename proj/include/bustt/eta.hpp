#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bustt/errors.hpp"
#include "bustt/ingest/series.hpp"
#include "bustt/nsar.hpp"
#include "bustt/sar.hpp"

namespace bustt::eta {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// A section's temporal model as the multi-section loop sees it:
/// a FutStep-ahead log-domain prediction conditioned on this day's
/// closed bins (today_log[b-1] holds bin b, NaN marks a missing cell).
class TemporalPredictor {
 public:
  virtual ~TemporalPredictor() = default;
  virtual double forecast_log(std::span<const double> today_log, int fut_step) const = 0;
};

/// Seasonal AR predictor: today's closed bins are appended to the
/// training concatenation and the model iterates fut_step steps.
/// Missing cells fall back to the model's training mean.
class SarPredictor final : public TemporalPredictor {
 public:
  SarPredictor(sar::SarModel model, std::vector<double> training_log)
      : model_(std::move(model)), training_log_(std::move(training_log)) {
    if (model_.domain != sar::Domain::Log)
      throw std::invalid_argument("SarPredictor: multi-section prediction runs in the log domain");
  }

  double forecast_log(std::span<const double> today_log, int fut_step) const override {
    std::vector<double> history = training_log_;
    history.reserve(history.size() + today_log.size());
    for (double v : today_log) history.push_back(std::isnan(v) ? model_.train_mean : v);
    return sar::forecast(model_, history, fut_step).back();
  }

  const sar::SarModel& model() const { return model_; }

 private:
  sar::SarModel model_;
  std::vector<double> training_log_;
};

/// Non-stationary AR predictor: same-day conditioning only. Missing
/// cells fall back to the model's implied unconditional bin means.
class NsarPredictor final : public TemporalPredictor {
 public:
  explicit NsarPredictor(nsar::NsarModel model)
      : model_(std::move(model)), means_(model_.implied_bin_means()) {
    if (model_.domain != sar::Domain::Log)
      throw std::invalid_argument("NsarPredictor: multi-section prediction runs in the log domain");
  }

  double forecast_log(std::span<const double> today_log, int fut_step) const override {
    std::vector<double> filled(today_log.size());
    for (std::size_t i = 0; i < today_log.size(); ++i) {
      filled[i] = std::isnan(today_log[i]) ? means_[i] : today_log[i];
    }
    return nsar::forecast(model_, filled, static_cast<int>(filled.size()) + fut_step);
  }

  const nsar::NsarModel& model() const { return model_; }

 private:
  nsar::NsarModel model_;
  std::vector<double> means_;
};

/// Immutable view of the realtime store taken at query time: values in
/// seconds per (section, bin) for fully closed bins only.
struct StoreSnapshot {
  int watermark = 0;  // last fully closed bin (0 = nothing closed)
  int bins = 0;
  std::vector<std::vector<double>> values;  // [section][bin-1], NaN when empty

  /// Log-domain conditioning vector for bins 1..limit of one section.
  std::vector<double> today_log(int section, int limit) const {
    std::vector<double> out(static_cast<std::size_t>(std::max(0, limit)), kMissing);
    if (section < 0 || section >= static_cast<int>(values.size())) return out;
    const auto& row = values[static_cast<std::size_t>(section)];
    const int upto = std::min({limit, watermark, static_cast<int>(row.size())});
    for (int b = 1; b <= upto; ++b) {
      const double v = row[static_cast<std::size_t>(b - 1)];
      if (!std::isnan(v)) out[static_cast<std::size_t>(b - 1)] = std::log(v);
    }
    return out;
  }
};

/// Aggregated real-time travel times from previous buses, one running
/// geometric mean per (section, bin) of the current day. One writer,
/// many readers; readers take whole-store snapshots so a query never
/// observes a half-applied update.
class RealtimeStore {
 public:
  RealtimeStore(int sections, int bins)
      : bins_(bins), cells_(static_cast<std::size_t>(sections), std::vector<Cell>(static_cast<std::size_t>(bins))) {}

  /// Bin rollover: the watermark becomes current_bin - 1.
  void set_current_bin(int bin) {
    std::unique_lock lock(mu_);
    if (bin > current_bin_) current_bin_ = bin;
  }

  int current_bin() const {
    std::shared_lock lock(mu_);
    return current_bin_;
  }

  /// Fold a record into its (section, bin) aggregate. Future-binned
  /// records are rejected (returns false); records for the open bin are
  /// stored but stay invisible until the bin closes.
  bool add(int section, int bin, double travel_time_s) {
    if (travel_time_s <= 0.0) throw std::invalid_argument("RealtimeStore: non-positive travel time");
    std::unique_lock lock(mu_);
    if (section < 0 || section >= static_cast<int>(cells_.size()) || bin < 1 || bin > bins_)
      throw std::invalid_argument("RealtimeStore: section/bin out of range");
    if (bin > current_bin_) return false;
    Cell& c = cells_[static_cast<std::size_t>(section)][static_cast<std::size_t>(bin - 1)];
    c.log_sum += std::log(travel_time_s);
    ++c.n;
    return true;
  }

  StoreSnapshot snapshot() const {
    std::shared_lock lock(mu_);
    StoreSnapshot snap;
    snap.watermark = current_bin_ - 1;
    snap.bins = bins_;
    snap.values.resize(cells_.size());
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      auto& row = snap.values[s];
      row.assign(static_cast<std::size_t>(bins_), kMissing);
      for (int b = 1; b <= snap.watermark && b <= bins_; ++b) {
        const Cell& c = cells_[s][static_cast<std::size_t>(b - 1)];
        if (c.n > 0) row[static_cast<std::size_t>(b - 1)] = std::exp(c.log_sum / c.n);
      }
    }
    return snap;
  }

 private:
  struct Cell {
    double log_sum = 0.0;
    int n = 0;
  };
  mutable std::shared_mutex mu_;
  int bins_;
  int current_bin_ = 1;
  std::vector<std::vector<Cell>> cells_;
};

struct EtaQuery {
  int current_section = 0;     // section the bus is just leaving
  double current_time_s = 0;   // seconds-of-day
  int horizon_sections = 0;    // K
};

struct EtaStep {
  int k = 0;
  int section = 0;
  int fut_step = 0;      // temporal steps ahead used at this section
  int exp_time_bin = 0;  // bin the bus is expected to occupy on entry
  double predicted_s = 0.0;
  double cum_exit_s = 0.0;  // predicted exit clock time (seconds-of-day)
};

struct EtaPrediction {
  int start_bin = 0;  // j, the bin containing the query time
  std::vector<EtaStep> steps;
  double arrival_time_s = 0.0;  // current_time + sum of predictions
};

/// Multi-section-ahead prediction: walk sections i+1..i+K, doing a
/// FutStep-step log-domain prediction at each, exponentiating, and
/// advancing the expected exit clock. Whenever the exit clock leaves
/// ExpTimeBin, FutStep and ExpTimeBin both advance (repeatedly, so a
/// section longer than a bin is tracked across every boundary it
/// crosses). Conditioning is this day's store data through bin j-1.
inline EtaPrediction predict_multi_section(
    std::span<const TemporalPredictor* const> predictors, const StoreSnapshot& store,
    const EtaQuery& q, const ingest::BinGrid& bins) {
  const int j = bins.bin_of(q.current_time_s);
  if (j == 0) throw DataError("predict_multi_section: query time outside the active window");
  if (q.horizon_sections < 0) throw std::invalid_argument("predict_multi_section: negative horizon");

  EtaPrediction out;
  out.start_bin = j;
  out.arrival_time_s = q.current_time_s;
  if (q.horizon_sections == 0) return out;
  if (q.current_section + q.horizon_sections >= static_cast<int>(predictors.size()))
    throw std::invalid_argument("predict_multi_section: horizon extends past the last section");

  double exit_clock = q.current_time_s;
  int fut_step = 1;
  int exp_bin = j;
  out.steps.reserve(static_cast<std::size_t>(q.horizon_sections));
  for (int k = 1; k <= q.horizon_sections; ++k) {
    const int section = q.current_section + k;
    const TemporalPredictor* predictor = predictors[static_cast<std::size_t>(section)];
    if (predictor == nullptr)
      throw DataError("predict_multi_section: no model for section " + std::to_string(section));
    const auto today = store.today_log(section, j - 1);
    const double predicted = std::exp(predictor->forecast_log(today, fut_step));
    exit_clock += predicted;
    out.steps.push_back(EtaStep{k, section, fut_step, exp_bin, predicted, exit_clock});
    while (exit_clock >= bins.bin_end_s(exp_bin)) {
      ++fut_step;
      ++exp_bin;
    }
  }
  out.arrival_time_s = exit_clock;
  return out;
}

/// Arrival clock time at a stop: traverse sections i+1..n-1 and arrive
/// at the entry of the stop's section n.
inline EtaPrediction eta_to_stop(std::span<const TemporalPredictor* const> predictors,
                                 const StoreSnapshot& store, int current_section,
                                 double current_time_s, int stop_section,
                                 const ingest::BinGrid& bins) {
  if (stop_section <= current_section)
    throw std::invalid_argument("eta_to_stop: stop section must be ahead of the bus");
  const EtaQuery q{current_section, current_time_s, stop_section - current_section - 1};
  return predict_multi_section(predictors, store, q, bins);
}

}  // namespace bustt::eta
