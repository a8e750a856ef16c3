#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ggmsel/graphs.hpp"

namespace ggmsel {

/// n x p observation matrix; rows are observations.
class Sample {
 public:
  explicit Sample(Eigen::MatrixXd X);

  int n() const noexcept { return static_cast<int>(X_.rows()); }
  int p() const noexcept { return static_cast<int>(X_.cols()); }
  const Eigen::MatrixXd& X() const noexcept { return X_; }
  std::span<const double> column(int j) const {
    return {X_.col(j).data(), static_cast<std::size_t>(X_.rows())};
  }

 private:
  Eigen::MatrixXd X_;
};

/// p x p matrix with zero diagonal. Entry (i, j) is the coefficient of
/// X^(i) in the regression of X^(j); column j is the coefficient vector of
/// vertex j.
class RegressionMatrix {
 public:
  explicit RegressionMatrix(int p = 0);
  explicit RegressionMatrix(Eigen::MatrixXd theta);

  int p() const noexcept { return static_cast<int>(theta_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return theta_; }
  double operator()(int i, int j) const { return theta_(i, j); }
  void set_column(int j, const Eigen::VectorXd& coefficients);
  /// Directed shape of the nonzero pattern: i in m_j iff entry (i, j) != 0.
  DirectedShape support() const;

 private:
  Eigen::MatrixXd theta_;
};

/// Householder QR grown one column at a time. Pushing a column costs
/// O(n * depth); popping is free. Used to sweep nested neighborhoods.
class IncrementalQR {
 public:
  IncrementalQR(int n, int max_columns);

  /// Resets to depth 0 with response y.
  void reset(std::span<const double> y);
  /// Appends predictor x. Returns false, leaving the state unchanged, when x
  /// is numerically in the span of the current columns or depth == n.
  bool push(std::span<const double> x);
  void pop();

  int depth() const noexcept { return depth_; }
  /// Squared residual norm of y after projecting on the current columns.
  double rss() const noexcept { return rss_[static_cast<std::size_t>(depth_)]; }
  /// Least-squares coefficients for the current columns, in push order.
  void solve(std::span<double> beta) const;

 private:
  int n_;
  int max_columns_;
  int depth_ = 0;
  std::vector<double> reflectors_;  // column k holds v_k (entries k..n-1 used)
  std::vector<double> tau_;
  std::vector<double> r_;           // max_columns x max_columns, column-major
  std::vector<double> z_;           // (max_columns + 1) transformed responses
  std::vector<double> rss_;
  std::vector<double> work_;
};

/// Least-squares fit of one column on a neighborhood.
struct ColumnFit {
  Eigen::VectorXd coefficients;  // length p, zero outside the neighborhood
  double rss = 0.0;
  bool rank_deficient = false;
};

/// Regresses X^(j) on {X^(i) : i in m_j}. Rank-deficient designs get the
/// minimum-norm solution and are flagged.
ColumnFit fit_column(const Sample& sample, int j, VertexSet m_j);

struct FitResult {
  RegressionMatrix theta_hat;
  std::vector<double> rss;
  DirectedShape shape;
  bool rank_deficient = false;

  double total_risk() const;
};

/// Fits every column on its neighborhood in `shape`.
FitResult fit_model(const Sample& sample, const DirectedShape& shape);

/// ||X (I - A)||_F^2 evaluated directly.
double empirical_risk(const Sample& sample, const RegressionMatrix& A);

/// Receives (neighborhood, rss, coefficients over the members in increasing
/// vertex order).
using NeighborhoodFitVisitor = std::function<void(VertexSet, double, std::span<const double>)>;

/// Fits column j on every neighborhood of size <= max_size, visited by size
/// then lexicographically (the order of enumerate_neighborhoods).
void for_each_neighborhood_fit(const Sample& sample, int j, int max_size, const NeighborhoodFitVisitor& visit);

}  // namespace ggmsel
