#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "ggmsel/error.hpp"
#include "ggmsel/specfun.hpp"
#include "oracles.hpp"

using namespace ggmsel;

namespace {

// Penalty table at n=15, p=10, K=2, cross-checked against oracle::penalty.
const std::vector<double> kPen15x10 = {0.0, 20.594731324997085, 49.163801997123905, 85.53401721743019,
                                       129.89197755865754};

}  // namespace

TEST(IncompleteBeta, SymmetryAndEndpoints) {
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
  for (double x : {0.01, 0.2, 0.5, 0.77, 0.999}) {
    EXPECT_NEAR(regularized_incomplete_beta(2.5, 7.0, x) + regularized_incomplete_beta(7.0, 2.5, 1.0 - x), 1.0,
                1e-13);
  }
  // I_x(1, b) = 1 - (1 - x)^b.
  EXPECT_NEAR(regularized_incomplete_beta(1.0, 4.0, 0.3), 1.0 - std::pow(0.7, 4.0), 1e-14);
  EXPECT_THROW(regularized_incomplete_beta(0.0, 1.0, 0.5), DomainError);
  EXPECT_THROW(regularized_incomplete_beta(1.0, 1.0, 1.5), DomainError);
}

TEST(FisherTail, BoundaryValues) {
  EXPECT_EQ(fisher_tail(3, 7, 0.0), 1.0);
  for (int d : {1, 2, 5, 11}) EXPECT_NEAR(fisher_tail(d, d, 1.0), 0.5, 1e-14);
  EXPECT_LT(fisher_tail(4, 9, 1e6), 1e-10);
  EXPECT_EQ(fisher_tail(4, 9, std::numeric_limits<double>::infinity()), 0.0);
  EXPECT_THROW(fisher_tail(0, 3, 1.0), DomainError);
  EXPECT_THROW(fisher_tail(2, 3, -1.0), DomainError);
}

TEST(FisherTail, MatchesQuadratureOracle) {
  for (int d : {1, 2, 4, 7, 13}) {
    for (int N : {1, 3, 9, 25}) {
      for (double x : {0.05, 0.7, 2.0, 6.5}) {
        EXPECT_NEAR(fisher_tail(d, N, x), oracle::fisher_tail(d, N, x), 1e-10) << d << " " << N << " " << x;
      }
    }
  }
}

TEST(Dkhi, MatchesQuadratureOracle) {
  for (int d : {1, 3, 6}) {
    for (int N : {1, 4, 13}) {
      for (double x : {0.1, 1.0, 5.0, 20.0}) {
        EXPECT_NEAR(dkhi(d, N, x), oracle::dkhi(d, N, x), 1e-9) << d << " " << N << " " << x;
      }
    }
  }
}

TEST(Dkhi, MatchesMonteCarloExpectation) {
  const oracle::MonteCarlo mc = oracle::dkhi_monte_carlo(3, 8, 2.5, 400'000, 17);
  EXPECT_NEAR(dkhi(3, 8, 2.5), mc.mean, 3.0 * mc.standard_error);
}

TEST(Dkhi, StrictlyDecreasingOnLogGrid) {
  for (int d : {1, 2, 5, 10}) {
    for (int N : {1, 4, 13, 40}) {
      double previous = 1.0 + 1e-12;
      for (int k = 0; k < 120; ++k) {
        const double x = 1e-6 * std::pow(1e9, k / 119.0);
        const double v = dkhi(d, N, x);
        EXPECT_LT(v, previous) << d << " " << N << " " << x;
        previous = v;
      }
    }
  }
}

TEST(Dkhi, RejectsInvalidArguments) {
  EXPECT_THROW(DkhiArgs(0, 3, 1.0), DomainError);
  EXPECT_THROW(DkhiArgs(2, 0, 1.0), DomainError);
  EXPECT_THROW(DkhiArgs(2, 3, 0.0), DomainError);
  EXPECT_THROW(dkhi(2, 3, -1.0), DomainError);
}

TEST(Edkhi, RoundTrip) {
  for (double q : {1e-6, 1e-3, 0.01, 0.1, 0.5, 0.9}) {
    EXPECT_NEAR(dkhi(2, 9, edkhi(2, 9, q)), q, 1e-9) << q;
    EXPECT_NEAR(dkhi(7, 3, edkhi(7, 3, q)), q, 1e-9) << q;
  }
  EXPECT_NEAR(dkhi(2, 9, edkhi(2, 9, 0.3)), 0.3, 1e-9);
}

TEST(Edkhi, AgreesWithOracleBisection) {
  EXPECT_NEAR(edkhi(4, 10, 0.01), oracle::edkhi(4, 10, 0.01), 1e-7 * oracle::edkhi(4, 10, 0.01));
}

TEST(Edkhi, BoundaryAndDomain) {
  EXPECT_EQ(edkhi(1, 13, 1.0), 0.0);
  EXPECT_THROW(edkhi(1, 13, 0.0), DomainError);
  EXPECT_THROW(edkhi(1, 13, 1.5), DomainError);
  EXPECT_THROW(edkhi(0, 13, 0.5), DomainError);
}

TEST(Penalty, MatchesPinnedTableAndOracle) {
  for (int d = 0; d <= 4; ++d) {
    const double value = penalty(15, 10, 2.0, d);
    EXPECT_NEAR(value, kPen15x10[static_cast<std::size_t>(d)], 1e-9 * (1.0 + kPen15x10[static_cast<std::size_t>(d)]));
    if (d > 0) {
      EXPECT_NEAR(value, oracle::penalty(15, 10, 2.0, d), 1e-6 * value) << d;
    }
  }
}

TEST(Penalty, MonteCarloCheckOfTheQuantile) {
  // Dkhi at the penalty's quantile equals the target level within sampling error.
  const int n = 15;
  const int p = 10;
  for (int d : {1, 3}) {
    const double x = penalty(n, p, 2.0, d) / (2.0 * (n - d) / (n - d - 1.0));
    const double target = std::exp(-log_binomial(p - 1, d)) / ((d + 1.0) * (d + 1.0));
    const oracle::MonteCarlo mc = oracle::dkhi_monte_carlo(d + 1, n - d - 1, x, 1'000'000, 99 + d);
    EXPECT_NEAR(mc.mean, target, 3.0 * mc.standard_error) << d;
  }
}

TEST(Penalty, LargeDimensionGuide) {
  // pen(d) stays below K (1 + e^eta sqrt(2 log p))^2 (d+1), with 25% slack.
  const double eta = 0.9;
  const double bound_factor = std::pow(1.0 + std::exp(eta) * std::sqrt(2.0 * std::log(10.0)), 2.0);
  for (int d = 5; d <= 9; ++d) {
    EXPECT_LE(penalty(15, 10, 2.0, d), 1.25 * 2.0 * bound_factor * (d + 1)) << d;
  }
}

TEST(Penalty, DomainErrors) {
  EXPECT_THROW(penalty(15, 10, 2.0, 14), DomainError);
  EXPECT_THROW(penalty(15, 10, 1.0, 1), DomainError);
  EXPECT_THROW(penalty(15, 3, 2.0, 3), DomainError);
  try {
    penalty(15, 10, 2.0, 14);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("penalty undefined"), std::string::npos);
  }
}

TEST(Penalty, LogBinomialLargeArguments) {
  EXPECT_NEAR(log_binomial(10, 3), std::log(120.0), 1e-12);
  EXPECT_TRUE(std::isfinite(log_binomial(5000, 2500)));
  EXPECT_TRUE(std::isfinite(penalty(200, 5000, 2.0, 10)));
}

TEST(PenaltyTable, ShapeMonotonicityAndDeterminism) {
  const PenaltyTable table = build_penalty_table(15, 10, 2.0, 4);
  ASSERT_EQ(table.max_degree(), 4);
  EXPECT_EQ(table(0), 0.0);
  for (int d = 1; d <= 4; ++d) {
    EXPECT_TRUE(std::isfinite(table(d)));
    EXPECT_GT(table(d), table(d - 1));
  }
  const PenaltyTable again = build_penalty_table(15, 10, 2.0, 4);
  for (int d = 0; d <= 4; ++d) EXPECT_EQ(table(d), again(d));
  EXPECT_THROW(table(5), DomainError);
  EXPECT_THROW(build_penalty_table(15, 10, 2.0, 14), DomainError);
}

TEST(PenaltyTable, IncreasingOnBenchmarkGrids) {
  for (int p : {10, 15, 20, 40}) {
    const PenaltyTable table = build_penalty_table(15, p, 2.0, 6);
    for (int d = 1; d <= table.max_degree(); ++d) EXPECT_GT(table(d), table(d - 1)) << p << " " << d;
  }
}

TEST(PenaltyTable, LargerKGivesLargerPenalty) {
  const PenaltyTable a = build_penalty_table(15, 10, 2.0, 4);
  const PenaltyTable b = build_penalty_table(15, 10, 2.5, 4);
  for (int d = 1; d <= 4; ++d) EXPECT_NEAR(b(d) / a(d), 1.25, 1e-12);
}

TEST(PenaltyTable, DeflatedForm) {
  const PenaltyTable t = build_deflated_penalty_table(40, 60, 0.5, 12);
  EXPECT_TRUE(std::isnan(t.K()));
  for (int d = 0; d <= 12; ++d) EXPECT_DOUBLE_EQ(t(d), d * std::log(59.0));
  EXPECT_THROW(build_deflated_penalty_table(40, 60, 1.0, 12), DomainError);
}
