#include "oracles.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>

namespace oracle {

double fisher_tail(double d, double N, double x) {
  if (x <= 0.0) return 1.0;
  const double log_norm = 0.5 * d * std::log(d / N) - std::log(boost::math::beta(0.5 * d, 0.5 * N));
  auto density = [&](double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(log_norm + (0.5 * d - 1.0) * std::log(t) - 0.5 * (d + N) * std::log1p(d * t / N));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density, x, std::numeric_limits<double>::infinity(), 1e-15);
}

double dkhi(int d, int N, double x) {
  const boost::math::chi_squared_distribution<double> chi_d(d);
  const boost::math::chi_squared_distribution<double> chi_d2(d + 2);
  const boost::math::chi_squared_distribution<double> chi_N(N);
  // E[(A - c)_+] = d P(chi2_{d+2} > c) - c P(chi2_d > c) for A ~ chi2_d.
  auto integrand = [&](double b) {
    if (b <= 0.0) return 0.0;
    const double c = x * b / N;
    const double excess = d * boost::math::cdf(boost::math::complement(chi_d2, c)) -
                          c * boost::math::cdf(boost::math::complement(chi_d, c));
    return boost::math::pdf(chi_N, b) * excess;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-14) / d;
}

MonteCarlo dkhi_monte_carlo(int d, int N, double x, int draws, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::chi_squared_distribution<double> chi_d(d);
  std::chi_squared_distribution<double> chi_N(N);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double a = chi_d(engine);
    const double b = chi_N(engine);
    const double v = std::max(a - x * b / N, 0.0) / d;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double var = (sum_sq / draws - mean * mean) * draws / (draws - 1.0);
  return {mean, std::sqrt(var / draws)};
}

double edkhi(int d, int N, double q) {
  if (q >= 1.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (dkhi(d, N, hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("oracle edkhi: no bracket");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dkhi(d, N, mid) > q ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double penalty(int n, int p, double K, int d) {
  const double binom = boost::math::binomial_coefficient<double>(static_cast<unsigned>(p - 1), static_cast<unsigned>(d));
  const double q = 1.0 / (binom * (d + 1.0) * (d + 1.0));
  return K * (n - d) / (n - d - 1.0) * edkhi(d + 1, n - d - 1, q);
}

Eigen::VectorXd normal_equations(const Eigen::MatrixXd& X, int j, const std::vector<int>& members) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  if (members.empty()) return beta;
  Eigen::MatrixXd Z(X.rows(), static_cast<Eigen::Index>(members.size()));
  for (std::size_t k = 0; k < members.size(); ++k) Z.col(static_cast<Eigen::Index>(k)) = X.col(members[k]);
  const Eigen::VectorXd b = (Z.transpose() * Z).ldlt().solve(Z.transpose() * X.col(j));
  for (std::size_t k = 0; k < members.size(); ++k) beta(members[k]) = b(static_cast<Eigen::Index>(k));
  return beta;
}

}  // namespace oracle
