#include "ggmsel/mb_baseline.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

namespace ggmsel {
namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace

std::string_view rule_name(CombineRule rule) noexcept { return rule == CombineRule::Or ? "or" : "and"; }

CombineRule parse_rule(std::string_view name) {
  if (name == "or") return CombineRule::Or;
  if (name == "and") return CombineRule::And;
  throw UsageError("unknown combination rule '" + std::string(name) + "' (expected or, and)");
}

LassoFit lasso_column(const Sample& sample, int j, double lambda, const LassoConfig& cfg) {
  const int n = sample.n();
  const int p = sample.p();
  if (j < 0 || j >= p) throw DomainError("column index out of range");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and nonnegative");
  if (cfg.max_sweeps < 1 || !(cfg.tolerance > 0.0)) throw DomainError("invalid lasso stopping rule");

  // Covariance updates: gram = X'X / n, corr = X'y / n.
  const Eigen::MatrixXd& X = sample.X();
  const Eigen::MatrixXd gram = X.transpose() * X / static_cast<double>(n);
  const Eigen::VectorXd corr = X.transpose() * X.col(j) / static_cast<double>(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd gram_beta = Eigen::VectorXd::Zero(p);  // gram * beta
  const double half = lambda / 2.0;

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < p; ++i) {
      if (i == j || gram(i, i) <= 0.0) continue;
      const double partial = corr(i) - gram_beta(i) + gram(i, i) * beta(i);
      const double updated = soft_threshold(partial, half) / gram(i, i);
      const double change = updated - beta(i);
      if (change != 0.0) {
        gram_beta += change * gram.col(i);
        beta(i) = updated;
        max_change = std::max(max_change, std::fabs(change));
      }
    }
    if (max_change <= cfg.tolerance) return {beta, sweep};
  }
  throw LassoNotConverged("lasso coordinate descent did not converge within " + std::to_string(cfg.max_sweeps) +
                              " sweeps",
                          beta);
}

double mb_lambda(const Sample& sample, int j, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  const double n = sample.n();
  const double p = sample.p();
  const double sigma = std::sqrt(sample.X().col(j).squaredNorm() / n);
  const boost::math::normal_distribution<double> standard;
  const double z = boost::math::quantile(boost::math::complement(standard, alpha / (2.0 * p * p)));
  return 2.0 * sigma / std::sqrt(n) * z;
}

MbEstimate mb_estimate(const Sample& sample, const LassoConfig& cfg) {
  const int p = sample.p();
  if (p > kMaxVertices) throw DomainError("neighborhood selection supports at most 64 variables");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  // Columns are scaled to unit empirical variance, as the method assumes;
  // coefficients are mapped back to the original scale.
  const double n = sample.n();
  Eigen::VectorXd scale(p);
  for (int j = 0; j < p; ++j) {
    const double sd = std::sqrt(sample.X().col(j).squaredNorm() / n);
    scale(j) = sd > 0.0 ? sd : 1.0;
  }
  const Sample standardized(sample.X() * scale.cwiseInverse().asDiagonal());
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
  int unconverged = 0;
  for (int j = 0; j < p; ++j) {
    Eigen::VectorXd beta;
    try {
      beta = lasso_column(standardized, j, mb_lambda(standardized, j, cfg.alpha), cfg).coefficients;
    } catch (const LassoNotConverged& e) {
      if (cfg.strict) throw;
      beta = e.last_iterate();
      ++unconverged;
    }
    theta.col(j) = beta.cwiseQuotient(scale) * scale(j);
  }
  Graph g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const bool ij = theta(i, j) != 0.0;
      const bool ji = theta(j, i) != 0.0;
      if (cfg.rule == CombineRule::Or ? (ij || ji) : (ij && ji)) g.add_edge(i, j);
    }
  }
  return {std::move(g), RegressionMatrix(std::move(theta)), unconverged};
}

}  // namespace ggmsel
