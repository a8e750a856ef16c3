#pragma once

// Reference implementations used only by the tests. They share no code
// with the library: tails come from numerical quadrature of densities, or
// from Boost's gamma-based chi-square distribution.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// P(F_{d,N} >= x) by exp-sinh quadrature of the Fisher density.
double fisher_tail(double d, double N, double x);

/// E[(chi2_d - x chi2_N / N)_+] / d, integrating over the chi2_N variable.
double dkhi(int d, int N, double x);

struct MonteCarlo {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean of (chi2_d - x chi2_N / N)_+ / d.
MonteCarlo dkhi_monte_carlo(int d, int N, double x, int draws, std::uint64_t seed);

/// Root of dkhi(d, N, .) = q by bisection on the quadrature oracle.
double edkhi(int d, int N, double q);

/// K (n-d)/(n-d-1) EDkhi[d+1, n-d-1, 1/(C(p-1,d)(d+1)^2)] from the oracles.
double penalty(int n, int p, double K, int d);

/// Least squares of column j on `members` through the normal equations.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& X, int j, const std::vector<int>& members);

}  // namespace oracle
