#include "ggmsel/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "ggmsel/error.hpp"
#include "ggmsel/mb_baseline.hpp"
#include "ggmsel/specfun.hpp"

namespace ggmsel {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string k_label(double K) {
  std::ostringstream out;
  out << "K=" << K;
  return out.str();
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  int count = 0;
  for (double v : values) {
    if (std::isnan(v)) continue;
    sum += v;
    ++count;
  }
  return count == 0 ? kNaN : sum / count;
}

struct Tally {
  double loss = 0.0;
  double power = 0.0;
  double fdr = 0.0;
  double degree = 0.0;
  int reps = 0;

  void add(double l, const EdgeMetrics& em, int deg) {
    loss += l;
    power += em.power;
    fdr += em.fdr;
    degree += deg;
    ++reps;
  }

  GraphRow row(int graph_id, int true_edges, double oracle) const {
    GraphRow r;
    r.graph_id = graph_id;
    r.true_edges = true_edges;
    r.n_reps = reps;
    r.mean_loss = loss / reps;
    r.oracle = oracle;
    r.r_risk = oracle > 0.0 ? r.mean_loss / oracle : kNaN;
    r.power = true_edges > 0 ? power / reps : kNaN;
    r.fdr = fdr / reps;
    r.mean_deg = degree / reps;
    return r;
  }
};

struct GraphOutcome {
  std::vector<GraphRow> rows;  // one per method, in report order
  int inexact_searches = 0;
  int unconverged_lasso = 0;
};

GraphOutcome run_graph(const BenchConfig& config, double q, const CollectionSpec& spec,
                       const std::vector<PenaltyTable>& pens, int k) {
  const RngSeed seeds{config.seed};
  const Graph g = sample_er_graph(config.p, q, seeds.graph_seed(k));
  GroundTruthOptions truth_options;
  truth_options.margin = config.margin;
  const GroundTruth truth = build_ground_truth(g, seeds.truth_seed(k), truth_options);

  const int max_size = spec.max_neighborhood();
  const bool tabulate = config.run_ours && (config.oracle || config.strategy == Strategy::ExactDecomposed ||
                                            config.strategy == Strategy::BranchAndBound);
  std::optional<LossAccumulator> losses;
  if (config.oracle) losses.emplace(truth, max_size);

  SelectOptions options;
  options.node_budget = config.node_budget;
  LassoConfig lasso;
  lasso.alpha = config.alpha;
  lasso.strict = false;

  std::vector<Tally> ours(config.run_ours ? pens.size() : 0);
  Tally mb;
  GraphOutcome outcome;
  for (int r = 0; r < config.reps; ++r) {
    const Sample sample = sample_gaussian(truth, config.n, seeds.replicate_seed(k, r));
    if (config.run_ours) {
      std::optional<CostTable> rss;
      if (tabulate) {
        rss.emplace(config.p, max_size);
        for (int j = 0; j < config.p; ++j) {
          for_each_neighborhood_fit(sample, j, max_size,
                                    [&](VertexSet m_j, double value, std::span<const double> coef) {
                                      rss->append(j, m_j, value);
                                      if (losses) losses->add_fit(j, m_j, coef);
                                    });
        }
        if (losses) losses->end_replicate();
      } else if (losses) {
        losses->add_replicate(sample);
      }
      for (std::size_t t = 0; t < pens.size(); ++t) {
        SelectionResult result;
        if (rss) {
          CostTable crit = *rss;
          for (int j = 0; j < config.p; ++j) {
            auto masks = crit.neighborhoods(j);
            auto costs = crit.mutable_costs(j);
            for (std::size_t e = 0; e < costs.size(); ++e) {
              costs[e] = column_criterion(costs[e], set_size(masks[e]), pens[t]);
            }
          }
          result = select(sample, spec, pens[t], config.strategy, crit, options);
        } else {
          result = select(sample, spec, pens[t], config.strategy, options);
        }
        if (config.strategy != Strategy::Stepwise && !result.exact) ++outcome.inexact_searches;
        const Graph selected = estimated_graph(result.theta_tilde);
        ours[t].add(msep_loss(result.theta_tilde, truth), edge_metrics(selected, g), degree(selected));
      }
    } else if (losses) {
      losses->add_replicate(sample);
    }
    if (config.run_mb) {
      const MbEstimate est = mb_estimate(sample, lasso);
      outcome.unconverged_lasso += est.unconverged_columns;
      double loss = 0.0;
      if (config.mb_refit && degree(est.graph) <= config.n - 2) {
        loss = msep_loss(fit_model(sample, est.graph.to_directed()).theta_hat, truth);
      } else {
        loss = msep_loss(est.theta, truth);
      }
      mb.add(loss, edge_metrics(est.graph, g), degree(est.graph));
    }
  }

  const double oracle = losses ? oracle_risk(*losses, spec, config.node_budget).value : kNaN;
  for (const Tally& tally : ours) outcome.rows.push_back(tally.row(k + 1, g.edge_count(), oracle));
  if (config.run_mb) outcome.rows.push_back(mb.row(k + 1, g.edge_count(), oracle));
  return outcome;
}

SizeSummary summarize_sizes(std::vector<int> column_sizes, std::vector<int> total_sizes) {
  SizeSummary s;
  s.column_sizes = std::move(column_sizes);
  s.total_sizes = std::move(total_sizes);
  if (s.column_sizes.empty()) return s;
  std::vector<int> sorted = s.column_sizes;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median_column = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  double sum = 0.0;
  int big = 0;
  for (int v : s.column_sizes) {
    sum += v;
    if (v >= 3) ++big;
  }
  s.mean_column = sum / static_cast<double>(s.column_sizes.size());
  s.fraction_at_least_3 = static_cast<double>(big) / static_cast<double>(s.column_sizes.size());
  double total = 0.0;
  for (int v : s.total_sizes) total += v;
  s.mean_total = total / static_cast<double>(s.total_sizes.size());
  return s;
}

}  // namespace

// --- Losses and edge metrics ----------------------------------------------------

double msep_loss(const Eigen::MatrixXd& theta_est, const GroundTruth& truth) {
  if (theta_est.rows() != truth.p() || theta_est.cols() != truth.p()) {
    throw DomainError("estimate and ground truth dimensions differ");
  }
  const Eigen::MatrixXd delta = theta_est - truth.theta.matrix();
  return (delta.transpose() * truth.C * delta).trace();
}

double msep_loss(const RegressionMatrix& theta_est, const GroundTruth& truth) {
  return msep_loss(theta_est.matrix(), truth);
}

Graph estimated_graph(const RegressionMatrix& theta) { return symmetrize(theta.support()); }

EdgeMetrics edge_metrics(const Graph& selected, const Graph& truth) {
  if (selected.p() != truth.p()) throw DomainError("graphs have different vertex counts");
  EdgeMetrics m;
  m.true_edges = truth.edge_count();
  m.selected_edges = selected.edge_count();
  for (const auto& [i, j] : selected.edges()) {
    if (truth.has_edge(i, j)) ++m.true_positives;
  }
  m.power_defined = m.true_edges > 0;
  m.power = m.power_defined ? static_cast<double>(m.true_positives) / m.true_edges : 0.0;
  m.fdr = m.selected_edges > 0 ? static_cast<double>(m.selected_edges - m.true_positives) / m.selected_edges : 0.0;
  return m;
}

EdgeMetrics edge_metrics(const DirectedShape& selected, const Graph& truth) {
  return edge_metrics(symmetrize(selected), truth);
}

// --- LossAccumulator --------------------------------------------------------------

LossAccumulator::LossAccumulator(const GroundTruth& truth, int max_size)
    : p_(truth.p()),
      max_size_(max_size),
      C_(truth.C),
      theta_(truth.theta.matrix()),
      masks_(static_cast<std::size_t>(truth.p())),
      sums_(static_cast<std::size_t>(truth.p())),
      cursor_(static_cast<std::size_t>(truth.p()), 0) {
  if (max_size < 0 || max_size > p_ - 1) throw DomainError("loss table bound must lie in [0, p - 1]");
  c_theta_ = C_ * theta_;
  theta_c_theta_ = (theta_.transpose() * c_theta_).diagonal();
}

void LossAccumulator::add_fit(int j, VertexSet m_j, std::span<const double> coefficients) {
  const auto ju = static_cast<std::size_t>(j);
  int members[kMaxVertices];
  int k = 0;
  for (VertexSet rest = m_j; rest != 0; rest &= rest - 1) members[k++] = std::countr_zero(rest);
  double quad = 0.0;
  double cross = 0.0;
  for (int a = 0; a < k; ++a) {
    const double ba = coefficients[static_cast<std::size_t>(a)];
    cross += ba * c_theta_(members[a], j);
    double row = 0.0;
    for (int b = 0; b < k; ++b) row += C_(members[a], members[b]) * coefficients[static_cast<std::size_t>(b)];
    quad += ba * row;
  }
  const double loss = quad - 2.0 * cross + theta_c_theta_(j);
  std::size_t& at = cursor_[ju];
  if (replicates_ == 0) {
    masks_[ju].push_back(m_j);
    sums_[ju].push_back(loss);
  } else {
    if (at >= masks_[ju].size() || masks_[ju][at] != m_j) {
      throw DomainError("loss fits must follow the same neighborhood order in every replicate");
    }
    sums_[ju][at] += loss;
  }
  ++at;
}

void LossAccumulator::end_replicate() {
  for (std::size_t j = 0; j < cursor_.size(); ++j) {
    if (cursor_[j] != masks_[j].size()) throw DomainError("replicate did not cover every neighborhood");
    cursor_[j] = 0;
  }
  ++replicates_;
}

void LossAccumulator::add_replicate(const Sample& sample) {
  if (sample.p() != p_) throw DomainError("sample and ground truth dimensions differ");
  for (int j = 0; j < p_; ++j) {
    for_each_neighborhood_fit(sample, j, max_size_, [&](VertexSet m_j, double, std::span<const double> coef) {
      add_fit(j, m_j, coef);
    });
  }
  end_replicate();
}

CostTable LossAccumulator::mean() const {
  if (replicates_ == 0) throw DomainError("no replicate has been added");
  CostTable table(p_, max_size_);
  for (int j = 0; j < p_; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    for (std::size_t t = 0; t < masks_[ju].size(); ++t) table.append(j, masks_[ju][t], sums_[ju][t] / replicates_);
  }
  return table;
}

OracleRisk oracle_risk(const LossAccumulator& losses, const CollectionSpec& spec, std::uint64_t node_budget) {
  if (losses.max_size() < spec.max_neighborhood()) {
    throw DomainError("loss table does not cover the collection's neighborhood sizes");
  }
  const SearchOutcome outcome = search_exact(spec, losses.mean(), node_budget);
  return {outcome.total, outcome.shape, outcome.exact};
}

OracleRisk oracle_risk(std::span<const Sample> samples, const GroundTruth& truth, const CollectionSpec& spec,
                       std::uint64_t node_budget) {
  if (samples.empty()) throw DomainError("oracle risk needs at least one replicate");
  if (spec.p != truth.p()) throw DomainError("collection and ground truth disagree on p");
  LossAccumulator losses(truth, spec.max_neighborhood());
  for (const Sample& sample : samples) losses.add_replicate(sample);
  return oracle_risk(losses, spec, node_budget);
}

// --- Benchmark --------------------------------------------------------------------

double BenchConfig::edge_probability() const {
  if (q.has_value() == s.has_value()) throw UsageError("exactly one of --q and --s must be given");
  return q.has_value() ? *q : *s / p;
}

void BenchConfig::validate() const {
  const double prob = edge_probability();
  if (!(prob >= 0.0 && prob <= 1.0)) throw UsageError("edge probability must lie in [0, 1]");
  if (n < 3) throw UsageError("n must be at least 3");
  if (p < 2 || p > kMaxVertices) throw UsageError("p must lie in [2, 64]");
  if (graphs < 1 || reps < 1) throw UsageError("graphs and reps must be positive");
  if (threads < 1) throw UsageError("threads must be positive");
  if (!run_ours && !run_mb) throw UsageError("no method selected");
  if (run_ours && Ks.empty()) throw UsageError("at least one K is required");
  for (double K : Ks) {
    if (!(K > 1.0)) throw UsageError("K must exceed 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  if (!(margin > 0.0)) throw UsageError("dominance margin must be positive");
  const CollectionSpec spec(family, D, p);
  if (spec.max_neighborhood() > n - 2) throw UsageError("penalty undefined: n−d−1 ≤ 0 (reduce --dmax below n - 1)");
  if (strategy == Strategy::ExactDecomposed && family != Family::DegreeDirected) {
    throw UsageError("strategy exact_decomposed requires family deg-directed");
  }
}

const MethodReport& BenchReport::method(const std::string& name) const {
  for (const MethodReport& m : methods) {
    if (m.method == name) return m;
  }
  throw UsageError("report has no method '" + name + "'");
}

BenchReport run_benchmark(const BenchConfig& config) {
  config.validate();
  const double q = config.edge_probability();
  const CollectionSpec spec(config.family, config.D, config.p);
  std::vector<PenaltyTable> pens;
  if (config.run_ours) {
    for (double K : config.Ks) pens.push_back(build_penalty_table(config.n, config.p, K, spec.max_neighborhood()));
  }

  std::vector<GraphOutcome> outcomes(static_cast<std::size_t>(config.graphs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= config.graphs) return;
      try {
        outcomes[static_cast<std::size_t>(k)] = run_graph(config, q, spec, pens, k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.graphs);
        return;
      }
    }
  };
  const int workers = std::min(config.threads, config.graphs);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  BenchReport report;
  report.config = config;
  report.q = q;
  std::vector<std::string> names;
  if (config.run_ours) {
    for (double K : config.Ks) names.push_back(k_label(K));
  }
  if (config.run_mb) names.push_back("mb");
  int inexact = 0;
  for (std::size_t m = 0; m < names.size(); ++m) {
    MethodReport method;
    method.method = names[m];
    std::vector<double> r_risk, power, fdr, deg;
    for (const GraphOutcome& outcome : outcomes) {
      const GraphRow& row = outcome.rows[m];
      method.rows.push_back(row);
      r_risk.push_back(row.r_risk);
      power.push_back(row.power);
      fdr.push_back(row.fdr);
      deg.push_back(row.mean_deg);
      method.n_reps += row.n_reps;
    }
    method.r_risk = mean_of(r_risk);
    method.power = mean_of(power);
    method.fdr = mean_of(fdr);
    method.mean_deg = mean_of(deg);
    report.methods.push_back(std::move(method));
  }
  int unconverged = 0;
  for (const GraphOutcome& outcome : outcomes) {
    inexact += outcome.inexact_searches;
    unconverged += outcome.unconverged_lasso;
  }
  const DegreeCheck check = validate_degree_condition(config.n, config.p, spec.max_neighborhood());
  if (!check.ok) report.warnings.push_back(check.message);
  if (inexact > 0) {
    report.warnings.push_back(std::to_string(inexact) +
                              " selections stopped at the node budget; their shapes are not proven minima");
  }
  if (unconverged > 0) {
    report.warnings.push_back(std::to_string(unconverged) +
                              " lasso columns hit the sweep limit; their last iterates were used");
  }
  return report;
}

// --- Overfitting experiment ---------------------------------------------------------

Prop1Result run_prop1_experiment(const Prop1Config& cfg) {
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (cfg.reps < 1) throw DomainError("reps must be positive");
  if (cfg.family != Family::DegreeDirected && cfg.family != Family::EdgeCountDirected) {
    throw UsageError("the overfitting experiment runs on a directed family");
  }
  const CollectionSpec spec(cfg.family, cfg.D, cfg.p);
  const int max_size = spec.max_neighborhood();
  if (max_size > cfg.n - 2) throw UsageError("penalty undefined: n−d−1 ≤ 0 (reduce --dmax below n - 1)");

  Prop1Result result;
  result.config = cfg;
  result.hypothesis_bound = std::exp(2.0 / (1.0 - cfg.gamma)) + 1.0;
  result.hypothesis_holds = cfg.p >= result.hypothesis_bound;
  if (!result.hypothesis_holds) {
    std::ostringstream msg;
    msg << "p = " << cfg.p << " is below e^{2/(1-gamma)} + 1 = " << result.hypothesis_bound
        << "; the overfitting guarantee does not apply";
    result.warnings.push_back(msg.str());
  }
  const bool exact =
      cfg.family == Family::DegreeDirected && neighborhood_count(cfg.p, max_size) <= cfg.exact_cap;
  result.strategy = exact ? Strategy::ExactDecomposed : Strategy::Stepwise;

  const PenaltyTable deflated = build_deflated_penalty_table(cfg.n, cfg.p, cfg.gamma, max_size);
  const PenaltyTable control = build_penalty_table(cfg.n, cfg.p, cfg.K, max_size);
  const GroundTruth truth = build_ground_truth(Graph(cfg.p), 0);
  const RngSeed seeds{cfg.seed};
  std::vector<int> cols_deflated, cols_control, tot_deflated, tot_control;
  for (int r = 0; r < cfg.reps; ++r) {
    const Sample sample = sample_gaussian(truth, cfg.n, seeds.replicate_seed(0, r));
    auto record = [&](const PenaltyTable& pen, std::vector<int>& cols, std::vector<int>& totals) {
      const SelectionResult sel = select(sample, spec, pen, result.strategy);
      int total = 0;
      for (int j = 0; j < cfg.p; ++j) {
        const int size = set_size(sel.m_hat.neighborhood(j));
        cols.push_back(size);
        total += size;
      }
      totals.push_back(total);
    };
    record(deflated, cols_deflated, tot_deflated);
    record(control, cols_control, tot_control);
  }
  result.deflated = summarize_sizes(std::move(cols_deflated), std::move(tot_deflated));
  result.control = summarize_sizes(std::move(cols_control), std::move(tot_control));
  return result;
}

}  // namespace ggmsel
