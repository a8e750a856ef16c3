#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ggmsel/fitting.hpp"
#include "ggmsel/genmodel.hpp"
#include "ggmsel/graphs.hpp"
#include "ggmsel/search.hpp"
#include "ggmsel/selector.hpp"

namespace ggmsel {

/// ||C^{1/2} (theta_est - theta)||_F^2, evaluated as trace(D' C D).
double msep_loss(const Eigen::MatrixXd& theta_est, const GroundTruth& truth);
double msep_loss(const RegressionMatrix& theta_est, const GroundTruth& truth);

/// Undirected graph of the nonzero entries of theta, in either direction.
Graph estimated_graph(const RegressionMatrix& theta);

struct EdgeMetrics {
  double power = 0.0;  // meaningful only when power_defined
  double fdr = 0.0;
  bool power_defined = false;
  int true_edges = 0;
  int selected_edges = 0;
  int true_positives = 0;
};

EdgeMetrics edge_metrics(const Graph& selected, const Graph& truth);
/// The shape is symmetrized first.
EdgeMetrics edge_metrics(const DirectedShape& selected, const Graph& truth);

/// Replicate-averaged per-column loss of the least-squares fit on every
/// neighborhood of size <= max_size. Column j of theta_m contributes
/// (beta - theta_j)' C (beta - theta_j).
class LossAccumulator {
 public:
  LossAccumulator(const GroundTruth& truth, int max_size);

  int max_size() const noexcept { return max_size_; }
  int replicates() const noexcept { return replicates_; }

  /// Adds the loss of one fit; `coefficients` lists the members of m_j in
  /// increasing order. Calls for a replicate must follow the enumeration order.
  void add_fit(int j, VertexSet m_j, std::span<const double> coefficients);
  void end_replicate();
  /// Fits the sample on every neighborhood and adds the losses.
  void add_replicate(const Sample& sample);
  /// Mean loss per column and neighborhood.
  CostTable mean() const;

 private:
  int p_;
  int max_size_;
  int replicates_ = 0;
  Eigen::MatrixXd C_;
  Eigen::MatrixXd theta_;
  Eigen::MatrixXd c_theta_;      // C theta
  Eigen::VectorXd theta_c_theta_;  // diag(theta' C theta)
  std::vector<std::vector<VertexSet>> masks_;
  std::vector<std::vector<double>> sums_;
  std::vector<std::size_t> cursor_;
};

struct OracleRisk {
  double value = 0.0;  // min over the collection of the mean loss
  DirectedShape argmin;
  bool exact = true;
};

/// min_m mean_r loss(theta_hat_m(X_r)), minimized exactly over the collection.
OracleRisk oracle_risk(const LossAccumulator& losses, const CollectionSpec& spec,
                       std::uint64_t node_budget = kDefaultNodeBudget);
OracleRisk oracle_risk(std::span<const Sample> samples, const GroundTruth& truth, const CollectionSpec& spec,
                       std::uint64_t node_budget = kDefaultNodeBudget);

struct BenchConfig {
  int n = 15;
  int p = 10;
  std::optional<double> q;  // edge probability
  std::optional<double> s;  // sparsity index; q = s / p
  int graphs = 20;
  int reps = 200;
  std::vector<double> Ks{2.0};
  Family family = Family::Degree;
  int D = 4;
  Strategy strategy = Strategy::Stepwise;
  bool run_ours = true;
  bool run_mb = false;
  bool oracle = true;  // compute r.Risk
  double alpha = 0.05;
  /// Score the baseline by the least-squares refit on its graph rather than
  /// by the shrunken lasso coefficients.
  bool mb_refit = true;
  double margin = 0.003;
  std::uint64_t seed = 1;
  int threads = 1;
  std::uint64_t node_budget = kDefaultNodeBudget;

  /// Edge probability after resolving --q / --s. Throws UsageError when
  /// neither or both are set.
  double edge_probability() const;
  /// Throws UsageError or DomainError on invalid settings.
  void validate() const;
};

struct GraphRow {
  int graph_id = 0;  // 1-based
  int true_edges = 0;
  double r_risk = 0.0;  // NaN when undefined
  double power = 0.0;   // NaN when the graph has no edge
  double fdr = 0.0;
  double mean_deg = 0.0;
  int n_reps = 0;
  double mean_loss = 0.0;
  double oracle = 0.0;  // NaN without oracle
};

struct MethodReport {
  std::string method;  // "K=2", "mb", ...
  std::vector<GraphRow> rows;
  double r_risk = 0.0;
  double power = 0.0;
  double fdr = 0.0;
  double mean_deg = 0.0;
  int n_reps = 0;
};

struct BenchReport {
  BenchConfig config;
  double q = 0.0;
  std::vector<MethodReport> methods;
  std::vector<std::string> warnings;

  const MethodReport& method(const std::string& name) const;
};

/// Graphs -> ground truths -> replicates -> selection -> aggregation. Graphs
/// run in parallel; each graph is processed serially, so the report does not
/// depend on the thread count.
BenchReport run_benchmark(const BenchConfig& config);

struct Prop1Config {
  double gamma = 0.5;
  int n = 40;
  int p = 60;
  int D = 12;
  int reps = 20;
  std::uint64_t seed = 1;
  double K = 2.0;  // control penalty
  Family family = Family::DegreeDirected;
  /// Exact per-column search when a column has at most this many candidate
  /// neighborhoods; stepwise otherwise.
  double exact_cap = 2e5;
};

struct SizeSummary {
  std::vector<int> column_sizes;  // replicate-major, p per replicate
  std::vector<int> total_sizes;   // |m_hat| per replicate
  double median_column = 0.0;
  double mean_column = 0.0;
  double fraction_at_least_3 = 0.0;
  double mean_total = 0.0;
};

struct Prop1Result {
  Prop1Config config;
  SizeSummary deflated;
  SizeSummary control;
  bool hypothesis_holds = true;
  double hypothesis_bound = 0.0;  // e^{2/(1-gamma)} + 1
  Strategy strategy = Strategy::Stepwise;
  std::vector<std::string> warnings;
};

/// Selection under pen(d) = 2(1-gamma) d log(p-1) and under the Fisher-quantile
/// penalty on matched samples with C = I.
Prop1Result run_prop1_experiment(const Prop1Config& cfg);

}  // namespace ggmsel
