#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "bustt/errors.hpp"

namespace bustt::eval {

/// Mean absolute percentage error, percent: 100/n * sum |a_i - p_i| / a_i.
inline double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw std::invalid_argument("mape: length mismatch");
  if (actual.empty()) throw std::invalid_argument("mape: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] <= 0.0) throw DataError("mape: actual values must be positive");
    s += std::fabs(actual[i] - predicted[i]) / actual[i];
  }
  return 100.0 * s / static_cast<double>(actual.size());
}

/// Mean absolute error, same units as the inputs.
inline double mae(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw std::invalid_argument("mae: length mismatch");
  if (actual.empty()) throw std::invalid_argument("mae: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) s += std::fabs(actual[i] - predicted[i]);
  return s / static_cast<double>(actual.size());
}

}  // namespace bustt::eval
