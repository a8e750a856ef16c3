#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "ggmsel/error.hpp"
#include "ggmsel/genmodel.hpp"
#include "ggmsel/mb_baseline.hpp"
#include "oracles.hpp"

using namespace ggmsel;

namespace {

Eigen::MatrixXd gaussian_matrix(int n, int p, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) X(i, j) = normal(engine);
  return X;
}

}  // namespace

TEST(Lasso, ZeroPenaltyIsOrdinaryLeastSquares) {
  const Sample s(gaussian_matrix(40, 5, 1));
  const LassoFit fit = lasso_column(s, 2, 0.0);
  const Eigen::VectorXd ols = oracle::normal_equations(s.X(), 2, {0, 1, 3, 4});
  EXPECT_LT((fit.coefficients - ols).norm(), 1e-6);
  EXPECT_EQ(fit.coefficients(2), 0.0);
}

TEST(Lasso, SinglePredictorClosedForm) {
  const Sample s(gaussian_matrix(30, 2, 2) + Eigen::MatrixXd::Constant(30, 2, 0.3));
  const double n = 30.0;
  const Eigen::VectorXd x = s.X().col(0);
  const Eigen::VectorXd y = s.X().col(1);
  for (double lambda : {0.0, 0.1, 0.5, 5.0}) {
    const double z = x.dot(y) / n;
    const double soft = std::copysign(std::max(std::abs(z) - lambda / 2.0, 0.0), z);
    EXPECT_NEAR(lasso_column(s, 1, lambda).coefficients(0), soft / (x.squaredNorm() / n), 1e-12);
  }
}

TEST(Lasso, KarushKuhnTuckerConditions) {
  const GroundTruth t = build_ground_truth(sample_er_graph(8, 0.4, 3), 4, GroundTruthOptions{0.3});
  const Sample s = sample_gaussian(t, 25, 5);
  const double n = 25.0;
  for (double lambda : {0.05, 0.3}) {
    for (int j = 0; j < 8; ++j) {
      const Eigen::VectorXd beta = lasso_column(s, j, lambda).coefficients;
      const Eigen::VectorXd r = s.X().col(j) - s.X() * beta;
      for (int i = 0; i < 8; ++i) {
        if (i == j) continue;
        const double g = 2.0 * s.X().col(i).dot(r) / n;
        if (beta(i) == 0.0) {
          EXPECT_LE(std::abs(g), lambda + 1e-6);
        } else {
          EXPECT_NEAR(g, lambda * (beta(i) > 0 ? 1.0 : -1.0), 1e-6);
        }
      }
    }
  }
}

TEST(Lasso, NonConvergenceCarriesLastIterate) {
  const GroundTruth t = build_ground_truth(sample_er_graph(8, 0.6, 3), 4, GroundTruthOptions{1e-4});
  const Sample s = sample_gaussian(t, 15, 5);
  LassoConfig cfg;
  cfg.max_sweeps = 1;
  cfg.tolerance = 1e-15;
  try {
    lasso_column(s, 0, 1e-3, cfg);
    FAIL() << "expected LassoNotConverged";
  } catch (const LassoNotConverged& e) {
    EXPECT_EQ(e.last_iterate().size(), 8);
  }
  EXPECT_THROW(lasso_column(s, 0, -1.0), DomainError);
}

TEST(MbLambda, FormulaWithNormalQuantile) {
  const Sample s(gaussian_matrix(15, 10, 9));
  const double sigma = std::sqrt(s.X().col(3).squaredNorm() / 15.0);
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - 0.05 / 200.0);
  EXPECT_NEAR(mb_lambda(s, 3, 0.05), 2.0 * sigma / std::sqrt(15.0) * z, 1e-9);
  EXPECT_THROW(mb_lambda(s, 3, 1.0), DomainError);
}

TEST(MbEstimate, IndependentColumnsGiveSparseGraph) {
  const Sample s(gaussian_matrix(400, 8, 12));
  const MbEstimate est = mb_estimate(s);
  EXPECT_LE(est.graph.edge_count(), 1);
}

TEST(MbEstimate, DuplicatedPairIsDetected) {
  Eigen::MatrixXd X = gaussian_matrix(30, 6, 13);
  X.col(4) = X.col(1) + 0.01 * gaussian_matrix(30, 1, 14);
  const MbEstimate est = mb_estimate(Sample(X));
  EXPECT_TRUE(est.graph.has_edge(1, 4));
}

TEST(MbEstimate, AndRuleIsSubgraphOfOrRule) {
  for (int k = 0; k < 10; ++k) {
    const GroundTruth t = build_ground_truth(sample_er_graph(10, 0.2, 60 + k), 61 + k, GroundTruthOptions{0.01});
    const Sample s = sample_gaussian(t, 15, 62 + k);
    LassoConfig or_cfg;
    or_cfg.strict = false;
    LassoConfig and_cfg = or_cfg;
    and_cfg.rule = CombineRule::And;
    const Graph g_or = mb_estimate(s, or_cfg).graph;
    const Graph g_and = mb_estimate(s, and_cfg).graph;
    for (const auto& [i, j] : g_and.edges()) EXPECT_TRUE(g_or.has_edge(i, j));
  }
}

TEST(MbEstimate, ScaleInvariantSupport) {
  const GroundTruth t = build_ground_truth(sample_er_graph(8, 0.3, 1), 2, GroundTruthOptions{0.05});
  const Sample s = sample_gaussian(t, 20, 3);
  Eigen::VectorXd scale(8);
  scale << 1, 10, 0.1, 3, 1, 7, 0.5, 2;
  const Sample scaled(s.X() * scale.asDiagonal());
  EXPECT_EQ(mb_estimate(s).graph, mb_estimate(scaled).graph);
}

TEST(CombineRule, Names) {
  EXPECT_EQ(parse_rule("and"), CombineRule::And);
  EXPECT_EQ(rule_name(CombineRule::Or), "or");
  EXPECT_THROW(parse_rule("xor"), UsageError);
}
