#pragma once

namespace bustt::stats {

/// Outcome of a hypothesis test. reject_null <=> p_value < significance
/// at the level the test was run with.
struct StatTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool reject_null = false;
  int meta = 0;  // lag (ADF) or degrees of freedom (t-test, K-S sample size)
};

inline StatTestResult make_test_result(double statistic, double p_value,
                                       double significance, int meta) {
  return StatTestResult{statistic, p_value, p_value < significance, meta};
}

}  // namespace bustt::stats
