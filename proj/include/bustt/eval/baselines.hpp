#pragma once

#include <stdexcept>

#include "bustt/ingest/series.hpp"

namespace bustt::eval {

/// Arithmetic mean of the training values (seconds) at one (section, bin).
inline double historical_average(const ingest::SectionSeries& series, int train_days, int bin) {
  if (train_days < 1 || train_days > series.days)
    throw std::invalid_argument("historical_average: bad train_days");
  double s = 0.0;
  for (int day = 0; day < train_days; ++day) s += series.cell(day, bin);
  return s / static_cast<double>(train_days);
}

/// One smoothing update: alpha * observation + (1 - alpha) * previous.
inline double exp_smoothing_step(double previous_estimate, double observation, double alpha) {
  if (alpha <= 0.0 || alpha > 1.0)
    throw std::invalid_argument("exp_smoothing_step: alpha must be in (0, 1]");
  return alpha * observation + (1.0 - alpha) * previous_estimate;
}

/// Running exponential smoother, seeded with the first observation.
class ExpSmoother {
 public:
  explicit ExpSmoother(double alpha = 0.5) : alpha_(alpha) {
    if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("ExpSmoother: alpha in (0, 1]");
  }

  bool seeded() const { return seeded_; }
  double estimate() const { return estimate_; }

  void observe(double value) {
    estimate_ = seeded_ ? exp_smoothing_step(estimate_, value, alpha_) : value;
    seeded_ = true;
  }

 private:
  double alpha_;
  double estimate_ = 0.0;
  bool seeded_ = false;
};

}  // namespace bustt::eval
