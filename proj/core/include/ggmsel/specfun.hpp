#pragma once

#include <span>
#include <vector>

namespace ggmsel {

/// Arguments of the Dkhi functional. Construction validates d >= 1, N >= 1, x > 0.
struct DkhiArgs {
  DkhiArgs(int d, int N, double x);

  int d;
  int N;
  double x;
};

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps full precision when x is close to 1.
double regularized_incomplete_beta(double a, double b, double x, double y);
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(F_{d,N} >= x) of the Fisher distribution.
double fisher_tail(double d, double N, double x);

/// Dkhi(d, N, x) = P(F_{d+2,N} >= x/(d+2)) - (x/d) P(F_{d,N+2} >= (N+2)x/(N d)).
/// Continuous and strictly decreasing in x, from 1 at 0+ down to 0.
double dkhi(const DkhiArgs& args);
double dkhi(int d, int N, double x);

/// Inverse of x -> dkhi(d, N, x). Accepts q in (0, 1]; q == 1 is the boundary
/// root x = 0.
double edkhi(int d, int N, double q);

/// log of the binomial coefficient C(n, k).
double log_binomial(int n, int k);

/// pen(d) = K (n-d)/(n-d-1) EDkhi[d+1, n-d-1, (C(p-1, d) (d+1)^2)^{-1}].
/// Requires K > 1, 0 <= d <= n-2 and d < p. pen(0) is exactly 0.
double penalty(int n, int p, double K, int d);

/// Complexity penalty pen(d) tabulated for d = 0..max_degree at fixed (n, p).
class PenaltyTable {
 public:
  PenaltyTable(int n, int p, double K, std::vector<double> values);

  int n() const noexcept { return n_; }
  int p() const noexcept { return p_; }
  /// Tuning constant; NaN for tables not built from the Fisher-quantile formula.
  double K() const noexcept { return K_; }
  int max_degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
  bool covers(int d) const noexcept { return d >= 0 && d <= max_degree(); }

  /// pen(d); DomainError when d is not covered.
  double operator()(int d) const;
  std::span<const double> values() const noexcept { return values_; }

 private:
  int n_;
  int p_;
  double K_;
  std::vector<double> values_;
};

PenaltyTable build_penalty_table(int n, int p, double K, int d_max);

/// The deflated penalty pen(d) = 2 (1 - gamma) d log(p - 1), for the
/// overfitting experiment.
PenaltyTable build_deflated_penalty_table(int n, int p, double gamma, int d_max);

}  // namespace ggmsel
