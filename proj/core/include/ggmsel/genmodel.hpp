#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "ggmsel/fitting.hpp"
#include "ggmsel/graphs.hpp"

namespace ggmsel {

/// One step of the splitmix64 generator; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Counter-based seed derivation: every (graph, replicate) cell owns a seed
/// that depends only on the master seed and its indices.
struct RngSeed {
  std::uint64_t master = 0;

  std::uint64_t graph_seed(int graph) const noexcept;
  std::uint64_t truth_seed(int graph) const noexcept;
  std::uint64_t replicate_seed(int graph, int replicate) const noexcept;
};

/// Seed derived from `base` and up to two indices.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// Each of the p(p-1)/2 pairs is an edge independently with probability q.
Graph sample_er_graph(int p, double q, std::uint64_t seed);

struct GroundTruth {
  Graph g;
  Eigen::MatrixXd K_prec;  // unit diagonal
  Eigen::MatrixXd C;       // K_prec^{-1}
  RegressionMatrix theta;  // theta(i, j) = -K_ij / K_jj
  Eigen::VectorXd sigma2;  // 1 / K_jj
  Eigen::MatrixXd C_factor;  // lower Cholesky factor of C, used for sampling

  int p() const noexcept { return g.p(); }
};

struct GroundTruthOptions {
  /// Added to sum_i |K_ij| to form K_jj before normalization.
  double margin = 0.003;
};

/// Precision matrix with entries uniform on [-1, 1] over the edges of g,
/// made strictly diagonally dominant and rescaled to a unit diagonal.
GroundTruth build_ground_truth(const Graph& g, std::uint64_t seed, const GroundTruthOptions& options = {});

/// n i.i.d. rows from N(0, C).
Sample sample_gaussian(const GroundTruth& truth, int n, std::uint64_t seed);

}  // namespace ggmsel
