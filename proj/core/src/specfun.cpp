#include "ggmsel/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxFractionTerms = 20000;

// glibc's lgamma writes the global signgam; the reentrant variant does not.
double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Continued fraction for I_x(a,b), modified Lentz evaluation. Converges
// quickly for x < (a+1)/(a+b+2).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxFractionTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge (a=" +
                     std::to_string(a) + ", b=" + std::to_string(b) +
                     ", x=" + std::to_string(x) + ")");
}

}  // namespace

DkhiArgs::DkhiArgs(int d_, int N_, double x_) : d(d_), N(N_), x(x_) {
  if (d < 1 || N < 1) throw DomainError("Dkhi: degrees of freedom must be >= 1");
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Dkhi: x must be positive and finite");
}

double regularized_incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
    throw DomainError("incomplete beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_fraction(b, a, y) / b;
}

double regularized_incomplete_beta(double a, double b, double x) {
  return regularized_incomplete_beta(a, b, x, 1.0 - x);
}

double fisher_tail(double d, double N, double x) {
  if (!(d > 0.0) || !(N > 0.0)) throw DomainError("fisher_tail: degrees of freedom must be positive");
  if (std::isnan(x) || x < 0.0) throw DomainError("fisher_tail: x must be nonnegative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  // P(F >= x) = I_z(N/2, d/2) with z = N / (N + d x).
  const double denom = N + d * x;
  return regularized_incomplete_beta(0.5 * N, 0.5 * d, N / denom, d * x / denom);
}

double dkhi(const DkhiArgs& args) {
  const double d = args.d;
  const double N = args.N;
  const double x = args.x;
  const double first = fisher_tail(d + 2.0, N, x / (d + 2.0));
  const double second = (x / d) * fisher_tail(d, N + 2.0, (N + 2.0) * x / (N * d));
  return first - second;
}

double dkhi(int d, int N, double x) { return dkhi(DkhiArgs(d, N, x)); }

double edkhi(int d, int N, double q) {
  if (d < 1 || N < 1) throw DomainError("EDkhi: degrees of freedom must be >= 1");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("EDkhi: q must lie in (0, 1]");
  if (q == 1.0) return 0.0;

  constexpr int kMaxDoublings = 200;
  constexpr double kValueTol = 1e-10;
  constexpr double kWidthTol = 1e-10;

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (dkhi(d, N, hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxDoublings) {
      throw NumericError("EDkhi: bracket expansion failed for d=" + std::to_string(d) +
                         ", N=" + std::to_string(N) + ", q=" + std::to_string(q));
    }
  }

  double mid = 0.5 * (lo + hi);
  for (;;) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at machine resolution
    const double value = dkhi(d, N, mid);
    if (value > q) {
      lo = mid;
    } else {
      hi = mid;
    }
    if ((hi - lo) <= kWidthTol * hi && std::fabs(value - q) <= kValueTol) break;
  }
  return 0.5 * (lo + hi);
}

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("log_binomial: need 0 <= k <= n");
  return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

double penalty(int n, int p, double K, int d) {
  if (!(K > 1.0)) throw DomainError("penalty: K must be > 1");
  if (d < 0) throw DomainError("penalty: d must be nonnegative");
  if (d > n - 2) throw DomainError("penalty undefined: n−d−1 ≤ 0");
  if (d >= p) throw DomainError("penalty: need d < p");
  if (d == 0) return 0.0;
  const double log_inv_q = log_binomial(p - 1, d) + 2.0 * std::log(d + 1.0);
  const double q = std::exp(-log_inv_q);
  const double nd = n - d;
  return K * nd / (nd - 1.0) * edkhi(d + 1, n - d - 1, q);
}

PenaltyTable::PenaltyTable(int n, int p, double K, std::vector<double> values)
    : n_(n), p_(p), K_(K), values_(std::move(values)) {
  if (values_.empty()) throw DomainError("penalty table must have at least one entry");
  if (max_degree() > n - 2) throw DomainError("penalty undefined: n−d−1 ≤ 0");
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw NumericError("penalty table entries must be finite and nonnegative");
  }
}

double PenaltyTable::operator()(int d) const {
  if (!covers(d)) {
    throw DomainError("penalty table has no entry for d=" + std::to_string(d) +
                      " (max " + std::to_string(max_degree()) + ")");
  }
  return values_[static_cast<std::size_t>(d)];
}

PenaltyTable build_penalty_table(int n, int p, double K, int d_max) {
  if (d_max < 0) throw DomainError("penalty table: d_max must be nonnegative");
  if (d_max > n - 2) throw DomainError("penalty undefined: n−d−1 ≤ 0");
  // Neighborhoods never exceed p - 1 vertices; C(p-1, d) vanishes beyond.
  const int top = std::min(d_max, p - 1);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(top) + 1);
  for (int d = 0; d <= top; ++d) values.push_back(penalty(n, p, K, d));
  return PenaltyTable(n, p, K, std::move(values));
}

PenaltyTable build_deflated_penalty_table(int n, int p, double gamma, int d_max) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("deflated penalty: gamma must lie in (0, 1)");
  if (p < 3) throw DomainError("deflated penalty: need p >= 3");
  if (d_max < 0 || d_max > n - 2) throw DomainError("penalty undefined: n−d−1 ≤ 0");
  std::vector<double> values;
  for (int d = 0; d <= d_max; ++d) values.push_back(2.0 * (1.0 - gamma) * d * std::log(p - 1.0));
  return PenaltyTable(n, p, std::numeric_limits<double>::quiet_NaN(), std::move(values));
}

}  // namespace ggmsel
