#include "ggmsel/selector.hpp"

#include <cmath>
#include <sstream>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

void check_inputs(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen, Strategy strategy) {
  if (spec.p != sample.p()) throw DomainError("collection and sample disagree on p");
  if (pen.n() != sample.n() || pen.p() != sample.p()) {
    throw DomainError("penalty table was built for a different (n, p)");
  }
  const int max_size = spec.max_neighborhood();
  if (max_size > sample.n() - 2) {
    throw DomainError("collection bound D = " + std::to_string(spec.D) + " exceeds n - 2 = " +
                      std::to_string(sample.n() - 2));
  }
  if (!pen.covers(max_size)) {
    throw DomainError("penalty table stops at d = " + std::to_string(pen.max_degree()) +
                      " but neighborhoods reach " + std::to_string(max_size));
  }
  if (strategy == Strategy::ExactDecomposed && spec.family != Family::DegreeDirected) {
    throw UsageError("strategy exact_decomposed requires family deg-directed, got " +
                     std::string(family_name(spec.family)));
  }
}

SearchOutcome run_exhaustive(const CollectionSpec& spec, const ColumnCost& cost, double cap) {
  try {
    return search_exhaustive(spec, cost, cap);
  } catch (const CollectionTooLarge& e) {
    std::ostringstream msg;
    msg << "collection has about " << e.estimated_count() << " members, above the enumeration cap " << cap
        << "; use --strategy stepwise or branch_and_bound";
    throw CollectionTooLarge(msg.str(), e.estimated_count());
  }
}

SelectionResult finish(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen, Strategy strategy,
                       const SearchOutcome& outcome, const SelectOptions& options) {
  const FitResult fit = fit_model(sample, outcome.shape);
  CriterionValue value = criterion(fit, pen);
  SelectionResult result;
  result.m_hat = outcome.shape;
  result.theta_hat = fit.theta_hat;
  result.theta_tilde = threshold(fit.theta_hat, sample.n());
  result.crit = value.crit;
  result.per_column_crit = std::move(value.per_column);
  result.strategy = strategy;
  result.exact = strategy != Strategy::Stepwise && outcome.exact;

  const DegreeCheck check = validate_degree_condition(sample.n(), sample.p(), spec.max_neighborhood(), options.eta);
  if (!check.ok) result.warnings.push_back(check.message);
  if (fit.rank_deficient) {
    result.warnings.push_back("rank-deficient design in at least one column; minimum-norm coefficients used");
  }
  if (strategy != Strategy::Stepwise && !outcome.exact) {
    result.warnings.push_back("node budget exhausted; the selected shape is the best found, not a proven minimum");
  }
  if (!(result.theta_tilde.matrix().array() == result.theta_hat.matrix().array()).all()) {
    result.warnings.push_back("thresholding zeroed at least one coefficient column");
  }
  return result;
}

}  // namespace

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::ExactDecomposed: return "exact_decomposed";
    case Strategy::Exhaustive: return "exhaustive";
    case Strategy::Stepwise: return "stepwise";
    case Strategy::BranchAndBound: return "branch_and_bound";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  std::string key(name);
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  for (Strategy s : {Strategy::ExactDecomposed, Strategy::Exhaustive, Strategy::Stepwise, Strategy::BranchAndBound}) {
    if (key == strategy_name(s)) return s;
  }
  throw UsageError("unknown strategy '" + std::string(name) +
                   "' (expected exact_decomposed, exhaustive, stepwise or branch_and_bound)");
}

double column_criterion(double rss, int size, const PenaltyTable& pen) {
  const int n = pen.n();
  if (size >= n) throw DomainError("neighborhood size must stay below n");
  return rss * (1.0 + pen(size) / static_cast<double>(n - size));
}

CriterionValue criterion(const FitResult& fit, const PenaltyTable& pen) {
  CriterionValue value;
  value.per_column.resize(fit.rss.size());
  for (std::size_t j = 0; j < fit.rss.size(); ++j) {
    value.per_column[j] = column_criterion(fit.rss[j], set_size(fit.shape.neighborhood(static_cast<int>(j))), pen);
    value.crit += value.per_column[j];
  }
  return value;
}

DegreeCheck validate_degree_condition(int n, int p, int D, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  if (D < 1) throw DomainError("degree bound D must be at least 1");
  if (n < 1 || p < 1) throw DomainError("n and p must be positive");
  DegreeCheck check;
  const double root = 1.1 + std::sqrt(std::log(static_cast<double>(p)));
  check.strong_bound = eta * n / (2.0 * root * root);
  check.weak_bound = (eta / 3.0) * n / (2.1 + std::log(static_cast<double>(p) / D));
  check.strong_holds = D <= check.strong_bound;
  check.weak_holds = D <= check.weak_bound;
  check.ok = check.strong_holds || check.weak_holds;
  std::ostringstream msg;
  msg << "degree bound D = " << D << (check.ok ? " satisfies" : " exceeds")
      << " the sufficient conditions for the risk bound (eta = " << eta << "): strong bound " << check.strong_bound
      << ", weak bound " << check.weak_bound;
  check.message = msg.str();
  return check;
}

double threshold_level(int n) {
  if (n < 1) throw DomainError("n must be positive");
  const double log_n = std::log(static_cast<double>(n));
  return std::exp(2.0 * log_n * log_n);
}

RegressionMatrix threshold(const RegressionMatrix& theta, int n) {
  const double limit = std::sqrt(static_cast<double>(theta.p())) * threshold_level(n);
  Eigen::MatrixXd out = theta.matrix();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    if (out.col(j).norm() > limit) out.col(j).setZero();
  }
  return RegressionMatrix(std::move(out));
}

CostTable criterion_costs(const Sample& sample, int max_size, const PenaltyTable& pen) {
  const int p = sample.p();
  CostTable table(p, max_size);
  for (int j = 0; j < p; ++j) {
    for_each_neighborhood_fit(sample, j, max_size, [&](VertexSet m_j, double rss, std::span<const double>) {
      table.append(j, m_j, column_criterion(rss, set_size(m_j), pen));
    });
  }
  return table;
}

SelectionResult select(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen, Strategy strategy,
                       const SelectOptions& options) {
  check_inputs(sample, spec, pen, strategy);
  switch (strategy) {
    case Strategy::ExactDecomposed:
    case Strategy::BranchAndBound:
      return select(sample, spec, pen, strategy, criterion_costs(sample, spec.max_neighborhood(), pen), options);
    case Strategy::Exhaustive:
    case Strategy::Stepwise: {
      const ColumnCost cost = [&](int j, VertexSet m_j) {
        return column_criterion(fit_column(sample, j, m_j).rss, set_size(m_j), pen);
      };
      const SearchOutcome outcome = strategy == Strategy::Exhaustive
                                        ? run_exhaustive(spec, cost, options.enumeration_cap)
                                        : search_stepwise(spec, cost);
      return finish(sample, spec, pen, strategy, outcome, options);
    }
  }
  throw UsageError("unknown strategy");
}

SelectionResult select(const Sample& sample, const CollectionSpec& spec, const PenaltyTable& pen, Strategy strategy,
                       const CostTable& costs, const SelectOptions& options) {
  check_inputs(sample, spec, pen, strategy);
  const ColumnCost cost = [&](int j, VertexSet m_j) { return costs.lookup(j, m_j); };
  switch (strategy) {
    case Strategy::ExactDecomposed:
      return finish(sample, spec, pen, strategy, search_decomposed(spec, costs), options);
    case Strategy::BranchAndBound:
      return finish(sample, spec, pen, strategy, search_exact(spec, costs, options.node_budget), options);
    case Strategy::Exhaustive:
      return finish(sample, spec, pen, strategy, run_exhaustive(spec, cost, options.enumeration_cap), options);
    case Strategy::Stepwise:
      return finish(sample, spec, pen, strategy, search_stepwise(spec, cost), options);
  }
  throw UsageError("unknown strategy");
}

}  // namespace ggmsel
