#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ggmsel/fitting.hpp"
#include "ggmsel/graphs.hpp"
#include "ggmsel/search.hpp"
#include "ggmsel/specfun.hpp"

namespace ggmsel {

enum class Strategy {
  ExactDecomposed,  // deg-directed only: independent per-column minima
  Exhaustive,       // scan of the whole collection
  Stepwise,         // forward-backward local search
  BranchAndBound,   // exact minimum for any family from tabulated costs
};

/// CLI spelling: exact_decomposed, exhaustive, stepwise, branch_and_bound.
std::string_view strategy_name(Strategy s) noexcept;
/// Accepts the CLI spelling, with '-' allowed in place of '_'.
Strategy parse_strategy(std::string_view name);

struct CriterionValue {
  double crit = 0.0;
  std::vector<double> per_column;
};

/// Summand of vertex j: rss * (1 + pen(size) / (n - size)).
double column_criterion(double rss, int size, const PenaltyTable& pen);

/// Crit(m) = sum_j rss_j (1 + pen(|m_j|) / (n - |m_j|)), with n = pen.n().
CriterionValue criterion(const FitResult& fit, const PenaltyTable& pen);

struct DegreeCheck {
  bool ok = false;
  bool strong_holds = false;  // D <= eta n / (2 (1.1 + sqrt(log p))^2)
  bool weak_holds = false;    // D <= (eta / 3) n / (2.1 + log(p / D))
  double strong_bound = 0.0;
  double weak_bound = 0.0;
  std::string message;
};

/// Advisory check of the maximal candidate degree against the two sufficient
/// conditions of the risk bound. Never blocks estimation.
DegreeCheck validate_degree_condition(int n, int p, int D, double eta = 0.9);

/// T_n = n^(2 log n).
double threshold_level(int n);

/// Zeroes every column whose Euclidean norm exceeds sqrt(p) * T_n.
RegressionMatrix threshold(const RegressionMatrix& theta, int n);

struct SelectOptions {
  double enumeration_cap = kDefaultEnumerationCap;
  std::uint64_t node_budget = kDefaultNodeBudget;
  double eta = 0.9;
};

struct SelectionResult {
  DirectedShape m_hat;
  RegressionMatrix theta_hat;
  RegressionMatrix theta_tilde;
  double crit = 0.0;
  std::vector<double> per_column_crit;
  std::vector<std::string> warnings;
  Strategy strategy = Strategy::Stepwise;
  /// False when the search is heuristic or a budget cut it short.
  bool exact = false;
};

/// Fills a cost table with the per-column criterion of every neighborhood of
/// size <= max_size.
CostTable criterion_costs(const Sample& sample, int max_size, const PenaltyTable& pen);

/// Minimizes Crit over the collection and returns the refitted, thresholded
/// estimator.
SelectionResult select(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen,
                       Strategy strategy, const SelectOptions& options = {});

/// Same, reusing criterion costs tabulated by criterion_costs.
SelectionResult select(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen,
                       Strategy strategy, const CostTable& costs, const SelectOptions& options = {});

}  // namespace ggmsel
