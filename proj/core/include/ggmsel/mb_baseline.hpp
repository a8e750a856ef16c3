#pragma once

#include <string_view>

#include <Eigen/Dense>

#include "ggmsel/error.hpp"
#include "ggmsel/fitting.hpp"
#include "ggmsel/graphs.hpp"

namespace ggmsel {

enum class CombineRule { Or, And };

std::string_view rule_name(CombineRule rule) noexcept;
CombineRule parse_rule(std::string_view name);

struct LassoConfig {
  double alpha = 0.05;
  CombineRule rule = CombineRule::Or;
  int max_sweeps = 10'000;
  double tolerance = 1e-8;
  /// When false, mb_estimate keeps the last iterate of a column that did not
  /// converge and counts it instead of throwing.
  bool strict = true;
};

/// Coordinate descent stopped at max_sweeps; carries the last iterate.
class LassoNotConverged : public NumericError {
 public:
  LassoNotConverged(const std::string& what, Eigen::VectorXd last)
      : NumericError(what), last_(std::move(last)) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_; }

 private:
  Eigen::VectorXd last_;
};

struct LassoFit {
  Eigen::VectorXd coefficients;  // length p, entry j is zero
  int sweeps = 0;
};

/// Minimizes (1/n)||X^(j) - X beta||^2 + lambda ||beta||_1 with beta_j = 0 by
/// cyclic coordinate descent with soft-thresholding.
LassoFit lasso_column(const Sample& sample, int j, double lambda, const LassoConfig& cfg = {});

/// lambda_j = (2 sigma_j / sqrt(n)) z(alpha / (2 p^2)), sigma_j^2 = ||X^(j)||^2 / n,
/// z(u) the upper-u standard normal quantile.
double mb_lambda(const Sample& sample, int j, double alpha);

struct MbEstimate {
  Graph graph;
  RegressionMatrix theta;  // lasso coefficients, column j for vertex j
  int unconverged_columns = 0;
};

/// Lasso neighborhood selection with the configured combination rule, run on
/// columns scaled to unit empirical variance.
MbEstimate mb_estimate(const Sample& sample, const LassoConfig& cfg = {});

}  // namespace ggmsel
