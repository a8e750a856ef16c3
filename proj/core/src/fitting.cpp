#include "ggmsel/fitting.hpp"

#include <cmath>
#include <string>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

// Relative size below which a projected column counts as dependent.
constexpr double kDependenceTol = 1e-10;

void check_column(const Sample& sample, int j, VertexSet m_j) {
  const int p = sample.p();
  if (p > kMaxVertices) throw DomainError("fits over neighborhoods support at most 64 variables");
  if (j < 0 || j >= p) throw DomainError("column index out of range");
  if ((m_j & vertex_bit(j)) != 0) throw DomainError("neighborhood of j must not contain j");
  if (p < kMaxVertices && (m_j >> p) != 0) throw DomainError("neighborhood references a column >= p");
  if (set_size(m_j) > sample.n() - 2) {
    throw DomainError("neighborhood size " + std::to_string(set_size(m_j)) + " exceeds n - 2");
  }
}

ColumnFit min_norm_fit(const Sample& sample, int j, const std::vector<int>& members) {
  const int n = sample.n();
  const int k = static_cast<int>(members.size());
  Eigen::MatrixXd design(n, k);
  for (int t = 0; t < k; ++t) design.col(t) = sample.X().col(members[static_cast<std::size_t>(t)]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(kDependenceTol);
  const Eigen::VectorXd y = sample.X().col(j);
  const Eigen::VectorXd beta = cod.solve(y);
  ColumnFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(sample.p());
  for (int t = 0; t < k; ++t) fit.coefficients(members[static_cast<std::size_t>(t)]) = beta(t);
  fit.rss = (y - design * beta).squaredNorm();
  fit.rank_deficient = cod.rank() < k;
  return fit;
}

}  // namespace

// --- Sample / RegressionMatrix ------------------------------------------------

Sample::Sample(Eigen::MatrixXd X) : X_(std::move(X)) {
  if (X_.rows() < 3) throw DomainError("sample needs at least 3 observations");
  if (X_.cols() < 1) throw DomainError("sample needs at least one variable");
  if (!X_.allFinite()) throw DomainError("sample contains non-finite entries");
}

RegressionMatrix::RegressionMatrix(int p) : theta_(Eigen::MatrixXd::Zero(p, p)) {}

RegressionMatrix::RegressionMatrix(Eigen::MatrixXd theta) : theta_(std::move(theta)) {
  if (theta_.rows() != theta_.cols()) throw DomainError("regression matrix must be square");
  for (Eigen::Index j = 0; j < theta_.rows(); ++j) {
    if (theta_(j, j) != 0.0) throw DomainError("regression matrix must have a zero diagonal");
  }
}

void RegressionMatrix::set_column(int j, const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != theta_.rows()) throw DomainError("coefficient vector has wrong length");
  if (coefficients(j) != 0.0) throw DomainError("regression matrix must have a zero diagonal");
  theta_.col(j) = coefficients;
}

DirectedShape RegressionMatrix::support() const {
  DirectedShape m(p());
  for (int j = 0; j < p(); ++j) {
    for (int i = 0; i < p(); ++i) {
      if (i != j && theta_(i, j) != 0.0) m.add_arc(i, j);
    }
  }
  return m;
}

// --- IncrementalQR ------------------------------------------------------------

IncrementalQR::IncrementalQR(int n, int max_columns)
    : n_(n),
      max_columns_(max_columns),
      reflectors_(static_cast<std::size_t>(n) * static_cast<std::size_t>(max_columns)),
      tau_(static_cast<std::size_t>(max_columns)),
      r_(static_cast<std::size_t>(max_columns) * static_cast<std::size_t>(max_columns)),
      z_(static_cast<std::size_t>(n) * static_cast<std::size_t>(max_columns + 1)),
      rss_(static_cast<std::size_t>(max_columns + 1)),
      work_(static_cast<std::size_t>(n)) {}

void IncrementalQR::reset(std::span<const double> y) {
  depth_ = 0;
  double ss = 0.0;
  for (int i = 0; i < n_; ++i) {
    z_[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)];
    ss += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  rss_[0] = ss;
}

bool IncrementalQR::push(std::span<const double> x) {
  const int k = depth_;
  if (k >= max_columns_ || k >= n_) return false;
  double* w = work_.data();
  double x_norm2 = 0.0;
  for (int i = 0; i < n_; ++i) {
    w[i] = x[static_cast<std::size_t>(i)];
    x_norm2 += w[i] * w[i];
  }
  for (int t = 0; t < k; ++t) {
    const double* v = reflectors_.data() + static_cast<std::size_t>(t) * n_;
    double s = 0.0;
    for (int i = t; i < n_; ++i) s += v[i] * w[i];
    s *= tau_[static_cast<std::size_t>(t)];
    for (int i = t; i < n_; ++i) w[i] -= s * v[i];
  }
  double tail2 = 0.0;
  for (int i = k; i < n_; ++i) tail2 += w[i] * w[i];
  const double tail = std::sqrt(tail2);
  if (!(tail > kDependenceTol * std::sqrt(x_norm2))) return false;

  const double alpha = -std::copysign(tail, w[k]);
  double* v = reflectors_.data() + static_cast<std::size_t>(k) * n_;
  for (int i = k; i < n_; ++i) v[i] = w[i];
  v[k] -= alpha;
  const double tau = 1.0 / (tail * (tail + std::fabs(w[k])));
  tau_[static_cast<std::size_t>(k)] = tau;

  double* rcol = r_.data() + static_cast<std::size_t>(k) * max_columns_;
  for (int i = 0; i < k; ++i) rcol[i] = w[i];
  rcol[k] = alpha;

  const double* z_prev = z_.data() + static_cast<std::size_t>(k) * n_;
  double* z_next = z_.data() + static_cast<std::size_t>(k + 1) * n_;
  double s = 0.0;
  for (int i = 0; i < n_; ++i) z_next[i] = z_prev[i];
  for (int i = k; i < n_; ++i) s += v[i] * z_next[i];
  s *= tau;
  for (int i = k; i < n_; ++i) z_next[i] -= s * v[i];
  double ss = 0.0;
  for (int i = k + 1; i < n_; ++i) ss += z_next[i] * z_next[i];
  rss_[static_cast<std::size_t>(k + 1)] = ss;
  depth_ = k + 1;
  return true;
}

void IncrementalQR::pop() {
  if (depth_ > 0) --depth_;
}

void IncrementalQR::solve(std::span<double> beta) const {
  const int k = depth_;
  const double* z = z_.data() + static_cast<std::size_t>(k) * n_;
  for (int row = k - 1; row >= 0; --row) {
    double acc = z[row];
    for (int col = row + 1; col < k; ++col) {
      acc -= r_[static_cast<std::size_t>(col) * max_columns_ + row] * beta[static_cast<std::size_t>(col)];
    }
    beta[static_cast<std::size_t>(row)] = acc / r_[static_cast<std::size_t>(row) * max_columns_ + row];
  }
}

// --- Fits ---------------------------------------------------------------------

ColumnFit fit_column(const Sample& sample, int j, VertexSet m_j) {
  check_column(sample, j, m_j);
  const std::vector<int> members = set_members(m_j);
  const int k = static_cast<int>(members.size());
  IncrementalQR qr(sample.n(), std::max(k, 1));
  qr.reset(sample.column(j));
  for (int c : members) {
    if (!qr.push(sample.column(c))) return min_norm_fit(sample, j, members);
  }
  ColumnFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(sample.p());
  std::vector<double> beta(static_cast<std::size_t>(k));
  qr.solve(beta);
  for (int t = 0; t < k; ++t) fit.coefficients(members[static_cast<std::size_t>(t)]) = beta[static_cast<std::size_t>(t)];
  fit.rss = qr.rss();
  return fit;
}

double FitResult::total_risk() const {
  double total = 0.0;
  for (double r : rss) total += r;
  return total;
}

FitResult fit_model(const Sample& sample, const DirectedShape& shape) {
  if (shape.p() != sample.p()) throw DomainError("shape and sample dimensions differ");
  const int p = sample.p();
  FitResult result{RegressionMatrix(p), std::vector<double>(static_cast<std::size_t>(p)), shape, false};
  for (int j = 0; j < p; ++j) {
    ColumnFit fit = fit_column(sample, j, shape.neighborhood(j));
    result.theta_hat.set_column(j, fit.coefficients);
    result.rss[static_cast<std::size_t>(j)] = fit.rss;
    result.rank_deficient = result.rank_deficient || fit.rank_deficient;
  }
  return result;
}

double empirical_risk(const Sample& sample, const RegressionMatrix& A) {
  const int p = sample.p();
  const Eigen::MatrixXd residual = sample.X() * (Eigen::MatrixXd::Identity(p, p) - A.matrix());
  return residual.squaredNorm();
}

void for_each_neighborhood_fit(const Sample& sample, int j, int max_size, const NeighborhoodFitVisitor& visit) {
  const int p = sample.p();
  check_column(sample, j, 0);
  if (max_size < 0 || max_size > p - 1) throw DomainError("neighborhood bound must lie in [0, p - 1]");
  if (max_size > sample.n() - 2) throw DomainError("neighborhood bound exceeds n - 2");

  std::vector<int> candidates;
  for (int v = 0; v < p; ++v) {
    if (v != j) candidates.push_back(v);
  }
  const int m = static_cast<int>(candidates.size());
  IncrementalQR qr(sample.n(), std::max(max_size, 1));
  qr.reset(sample.column(j));
  std::vector<double> beta(static_cast<std::size_t>(std::max(max_size, 1)));
  std::vector<int> members;

  // Depth-first sweep restricted to one size level at a time, so visits come
  // out by size and then lexicographically.
  std::function<void(int, int, VertexSet, bool)> descend = [&](int start, int remaining, VertexSet mask,
                                                               bool degenerate) {
    if (remaining == 0) {
      const int k = static_cast<int>(members.size());
      if (!degenerate) {
        qr.solve(std::span<double>(beta.data(), static_cast<std::size_t>(k)));
        visit(mask, qr.rss(), std::span<const double>(beta.data(), static_cast<std::size_t>(k)));
      } else {
        const ColumnFit fit = min_norm_fit(sample, j, members);
        for (int t = 0; t < k; ++t) beta[static_cast<std::size_t>(t)] = fit.coefficients(members[static_cast<std::size_t>(t)]);
        visit(mask, fit.rss, std::span<const double>(beta.data(), static_cast<std::size_t>(k)));
      }
      return;
    }
    for (int t = start; t <= m - remaining; ++t) {
      const int c = candidates[static_cast<std::size_t>(t)];
      members.push_back(c);
      if (!degenerate && qr.push(sample.column(c))) {
        descend(t + 1, remaining - 1, mask | vertex_bit(c), false);
        qr.pop();
      } else {
        descend(t + 1, remaining - 1, mask | vertex_bit(c), true);
      }
      members.pop_back();
    }
  };
  for (int size = 0; size <= max_size; ++size) descend(0, size, 0, false);
}

}  // namespace ggmsel
