#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ggmsel/graphs.hpp"

namespace ggmsel {

/// Objectives handled here are separable: total(m) = sum_j cost(j, m_j).
/// Both the penalized criterion and the expected loss of least-squares fits
/// have this form; only the collection couples the columns.
using ColumnCost = std::function<double(int j, VertexSet m_j)>;

struct SearchOutcome {
  DirectedShape shape;
  std::vector<double> per_column;
  double total = 0.0;
  /// False when a node budget stopped an exact search early; `shape` is then
  /// the best member found.
  bool exact = true;
  std::uint64_t evaluations = 0;
};

/// Column costs tabulated over every neighborhood of size <= max_size, in
/// the order of enumerate_neighborhoods.
class CostTable {
 public:
  CostTable(int p, int max_size);

  int p() const noexcept { return p_; }
  int max_size() const noexcept { return max_size_; }
  void append(int j, VertexSet m_j, double cost);
  std::span<const VertexSet> neighborhoods(int j) const { return masks_[static_cast<std::size_t>(j)]; }
  std::span<const double> costs(int j) const { return costs_[static_cast<std::size_t>(j)]; }
  std::span<double> mutable_costs(int j) { return costs_[static_cast<std::size_t>(j)]; }
  /// Cost of m_j; DomainError when the table does not hold it.
  double lookup(int j, VertexSet m_j) const;
  /// True when every column lists all neighborhoods up to max_size.
  bool complete() const;

 private:
  int p_;
  int max_size_;
  std::vector<std::vector<VertexSet>> masks_;
  std::vector<std::vector<double>> costs_;
};

/// Scans every member of the collection; guarded by the enumeration cap.
SearchOutcome search_exhaustive(const CollectionSpec& spec, const ColumnCost& cost,
                                double cap = kDefaultEnumerationCap);

/// Forward-backward local search over single edge (or arc) toggles, from the
/// empty shape. Each step applies the feasible toggle with the largest
/// decrease; ties go to the first toggle in lexicographic pair order. Stops
/// at a local minimum.
SearchOutcome search_stepwise(const CollectionSpec& spec, const ColumnCost& cost);

/// Exact minimum over deg-directed collections: columns are independent.
SearchOutcome search_decomposed(const CollectionSpec& spec, const CostTable& table);

inline constexpr std::uint64_t kDefaultNodeBudget = 20'000'000;

/// Exact minimum over any family from a complete cost table: decomposition
/// for deg-directed, a dynamic program over the arc budget for
/// edges-directed, and depth-first branch and bound over columns for the
/// undirected families.
SearchOutcome search_exact(const CollectionSpec& spec, const CostTable& table,
                           std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace ggmsel
