#include "ggmsel/genmodel.hpp"

#include <cmath>
#include <random>

#include "ggmsel/error.hpp"

namespace ggmsel {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t state = base;
  std::uint64_t h = splitmix64(state);
  state = h ^ (a + 0x632be59bd9b4e019ULL);
  h = splitmix64(state);
  state = h ^ (b + 0x8cb92ba72f3d8dd7ULL);
  return splitmix64(state);
}

std::uint64_t RngSeed::graph_seed(int graph) const noexcept {
  return derive_seed(master, 1, static_cast<std::uint64_t>(graph));
}

std::uint64_t RngSeed::truth_seed(int graph) const noexcept {
  return derive_seed(master, 2, static_cast<std::uint64_t>(graph));
}

std::uint64_t RngSeed::replicate_seed(int graph, int replicate) const noexcept {
  return derive_seed(derive_seed(master, 3, static_cast<std::uint64_t>(graph)), static_cast<std::uint64_t>(replicate));
}

Graph sample_er_graph(int p, double q, std::uint64_t seed) {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
  if (p < 1 || p > kMaxVertices) throw DomainError("vertex count out of range");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Graph g(p);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      if (unit(rng) < q) g.add_edge(i, j);
    }
  }
  return g;
}

GroundTruth build_ground_truth(const Graph& g, std::uint64_t seed, const GroundTruthOptions& options) {
  if (!(options.margin > 0.0) || !std::isfinite(options.margin)) {
    throw DomainError("dominance margin must be positive and finite");
  }
  const int p = g.p();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [i, j] : g.edges()) {
    double value = 0.0;
    while (value == 0.0) value = uniform(rng);  // keep the support equal to g
    K(i, j) = value;
    K(j, i) = value;
  }
  for (int j = 0; j < p; ++j) K(j, j) = K.col(j).cwiseAbs().sum() + options.margin;
  // Entrywise so that K stays exactly symmetric.
  const Eigen::VectorXd scale = K.diagonal().cwiseSqrt().cwiseInverse();
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < p; ++i) K(i, j) *= scale(i) * scale(j);
  }
  K.diagonal().setOnes();

  GroundTruth truth;
  truth.g = g;
  truth.K_prec = K;
  Eigen::LLT<Eigen::MatrixXd> k_llt(K);
  if (k_llt.info() != Eigen::Success) throw NumericError("precision matrix is not positive definite");
  truth.C = k_llt.solve(Eigen::MatrixXd::Identity(p, p));
  truth.C = 0.5 * (truth.C + truth.C.transpose());

  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(p, p);
  truth.sigma2.resize(p);
  for (int j = 0; j < p; ++j) {
    truth.sigma2(j) = 1.0 / K(j, j);
    for (int i = 0; i < p; ++i) {
      if (i != j) theta(i, j) = -K(i, j) / K(j, j);
    }
  }
  truth.theta = RegressionMatrix(std::move(theta));

  Eigen::LLT<Eigen::MatrixXd> c_llt(truth.C);
  if (c_llt.info() != Eigen::Success) throw NumericError("covariance matrix is not positive definite");
  truth.C_factor = c_llt.matrixL();
  return truth;
}

Sample sample_gaussian(const GroundTruth& truth, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample size must be positive");
  const int p = truth.p();
  if (truth.C_factor.rows() != p) throw NumericError("ground truth lacks a covariance factor");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Z(n, p);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) Z(r, c) = normal(rng);
  }
  return Sample(Z * truth.C_factor.transpose());
}

}  // namespace ggmsel
