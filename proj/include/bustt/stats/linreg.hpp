#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bustt::stats {

struct LinregResult {
  std::vector<double> weights;  // one per design column, intercept excluded
  double intercept = 0.0;       // 0 when fitted without intercept
  std::vector<double> residuals;
  double rss = 0.0;
};

/// Ordinary least squares of y on the given design columns.
///
/// Rank-deficient designs resolve to the minimum-norm solution
/// (complete orthogonal decomposition). Requires n > k + 1.
inline LinregResult linreg(const std::vector<std::vector<double>>& columns,
                           std::span<const double> y, bool with_intercept = true) {
  const std::size_t n = y.size();
  const std::size_t k = columns.size();
  for (const auto& c : columns) {
    if (c.size() != n) throw std::invalid_argument("linreg: column length mismatch");
  }
  if (n <= k + 1) throw std::invalid_argument("linreg: underdetermined (need n > k + 1)");

  const std::size_t cols = k + (with_intercept ? 1 : 0);
  Eigen::MatrixXd X(n, cols);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) X(i, j) = columns[j][i];
  }
  if (with_intercept) X.col(k).setOnes();
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));

  Eigen::VectorXd beta = X.completeOrthogonalDecomposition().solve(yv);
  Eigen::VectorXd resid = yv - X * beta;

  LinregResult out;
  out.weights.assign(beta.data(), beta.data() + k);
  out.intercept = with_intercept ? beta(static_cast<Eigen::Index>(k)) : 0.0;
  out.residuals.assign(resid.data(), resid.data() + n);
  out.rss = resid.squaredNorm();
  return out;
}

}  // namespace bustt::stats
