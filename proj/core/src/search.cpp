#include "ggmsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Memoizes column costs so local search and enumeration fit each
// neighborhood once.
class MemoCost {
 public:
  MemoCost(int p, const ColumnCost& cost) : cost_(cost), memo_(static_cast<std::size_t>(p)) {}

  double operator()(int j, VertexSet m_j) {
    auto& column = memo_[static_cast<std::size_t>(j)];
    auto it = column.find(m_j);
    if (it != column.end()) return it->second;
    const double value = cost_(j, m_j);
    column.emplace(m_j, value);
    return value;
  }

 private:
  const ColumnCost& cost_;
  std::vector<std::unordered_map<VertexSet, double>> memo_;
};

SearchOutcome make_outcome(const DirectedShape& shape, std::vector<double> per_column, std::uint64_t evaluations,
                           bool exact) {
  SearchOutcome out{shape, std::move(per_column), 0.0, exact, evaluations};
  for (double c : out.per_column) out.total += c;
  return out;
}

void check_table(const CollectionSpec& spec, const CostTable& table) {
  if (table.p() != spec.p) throw DomainError("cost table and collection disagree on p");
  if (table.max_size() < spec.max_neighborhood()) {
    throw DomainError("cost table covers neighborhoods up to " + std::to_string(table.max_size()) +
                      " but the collection needs " + std::to_string(spec.max_neighborhood()));
  }
  if (!table.complete()) throw DomainError("cost table is incomplete");
}

// Lower bits 0..j-1.
VertexSet low_bits(int j) { return j >= kMaxVertices ? ~VertexSet{0} : vertex_bit(j) - 1; }

// Per-column stepwise descent for deg-directed: moves in one column never
// change the options of another, so this reaches the same local minimum as
// the global best-move loop.
void stepwise_column(int j, int p, int D, MemoCost& cost, VertexSet& m_j, double& current,
                     std::uint64_t& evaluations) {
  for (;;) {
    double best_delta = 0.0;
    int best_i = -1;
    for (int i = 0; i < p; ++i) {
      if (i == j) continue;
      const VertexSet next = m_j ^ vertex_bit(i);
      if (set_size(next) > D) continue;
      ++evaluations;
      const double delta = cost(j, next) - current;
      if (delta < best_delta) {
        best_delta = delta;
        best_i = i;
      }
    }
    if (best_i < 0) return;
    m_j ^= vertex_bit(best_i);
    current += best_delta;
    current = cost(j, m_j);
  }
}

class BranchAndBound {
 public:
  BranchAndBound(const CollectionSpec& spec, const CostTable& table, std::uint64_t budget)
      : spec_(spec), table_(table), budget_(budget), p_(spec.p) {
    order_.resize(static_cast<std::size_t>(p_));
    for (int j = 0; j < p_; ++j) {
      auto costs = table.costs(j);
      auto masks = table.neighborhoods(j);
      auto& idx = order_[static_cast<std::size_t>(j)];
      for (std::size_t t = 0; t < costs.size(); ++t) {
        if (set_size(masks[t]) <= spec.max_neighborhood()) idx.push_back(t);
      }
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    }
    chosen_.assign(static_cast<std::size_t>(p_), 0);
    best_shape_.assign(static_cast<std::size_t>(p_), 0);
  }

  SearchOutcome run() {
    // The empty graph is always a member; it seeds the incumbent so ties
    // resolve toward it, as in enumeration order.
    best_ = 0.0;
    for (int j = 0; j < p_; ++j) best_ += table_.costs(j)[0];
    std::vector<VertexSet> req(static_cast<std::size_t>(p_), 0);
    std::vector<double> lb(static_cast<std::size_t>(p_));
    for (int k = 0; k < p_; ++k) lb[static_cast<std::size_t>(k)] = min_consistent(k, 0, 0);
    descend(0, 0.0, 0, req, lb);

    DirectedShape shape(p_, best_shape_);
    std::vector<double> per_column(static_cast<std::size_t>(p_));
    for (int j = 0; j < p_; ++j) per_column[static_cast<std::size_t>(j)] = table_.lookup(j, best_shape_[static_cast<std::size_t>(j)]);
    return make_outcome(shape, std::move(per_column), nodes_, !exhausted_);
  }

 private:
  // Cheapest neighborhood of column k whose bits below `fixed` equal `req`.
  double min_consistent(int k, int fixed, VertexSet req) const {
    const VertexSet low = low_bits(fixed);
    auto masks = table_.neighborhoods(k);
    auto costs = table_.costs(k);
    for (std::size_t t : order_[static_cast<std::size_t>(k)]) {
      if ((masks[t] & low) == req) return costs[t];
    }
    return kInf;
  }

  void descend(int j, double partial, int edges_used, const std::vector<VertexSet>& req,
               const std::vector<double>& lb) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    if (j == p_) {
      if (partial < best_) {
        best_ = partial;
        best_shape_ = chosen_;
      }
      return;
    }
    double rest_pre = 0.0;
    for (int k = j + 1; k < p_; ++k) rest_pre += lb[static_cast<std::size_t>(k)];

    const VertexSet low = low_bits(j);
    const VertexSet required = req[static_cast<std::size_t>(j)];
    auto masks = table_.neighborhoods(j);
    auto costs = table_.costs(j);
    std::vector<VertexSet> next_req(req);
    std::vector<double> next_lb(lb);
    for (std::size_t t : order_[static_cast<std::size_t>(j)]) {
      const VertexSet s = masks[t];
      const double c = costs[t];
      if (!(partial + c + rest_pre < best_)) break;
      if ((s & low) != required) continue;
      int new_edges = 0;
      if (spec_.family == Family::EdgeCount) {
        new_edges = set_size(s & ~low);
        if (edges_used + new_edges > spec_.D) continue;
      }
      double rest_post = 0.0;
      for (int k = j + 1; k < p_ && partial + c + rest_post < best_; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        next_req[ku] = req[ku] | ((s & vertex_bit(k)) != 0 ? vertex_bit(j) : 0);
        next_lb[ku] = min_consistent(k, j + 1, next_req[ku]);
        rest_post += next_lb[ku];
      }
      if (!(partial + c + rest_post < best_)) continue;
      chosen_[static_cast<std::size_t>(j)] = s;
      descend(j + 1, partial + c, edges_used + new_edges, next_req, next_lb);
      if (exhausted_) return;
    }
  }

  const CollectionSpec& spec_;
  const CostTable& table_;
  std::uint64_t budget_;
  int p_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<VertexSet> chosen_;
  std::vector<VertexSet> best_shape_;
  double best_ = kInf;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

SearchOutcome search_arc_budget(const CollectionSpec& spec, const CostTable& table) {
  const int p = spec.p;
  const int budget = spec.D;
  const int max_size = spec.max_neighborhood();
  // Cheapest neighborhood of each size per column (first in table order).
  std::vector<std::vector<double>> best_cost(static_cast<std::size_t>(p),
                                             std::vector<double>(static_cast<std::size_t>(max_size) + 1, kInf));
  std::vector<std::vector<VertexSet>> best_mask(static_cast<std::size_t>(p),
                                                std::vector<VertexSet>(static_cast<std::size_t>(max_size) + 1, 0));
  std::uint64_t evaluations = 0;
  for (int j = 0; j < p; ++j) {
    auto masks = table.neighborhoods(j);
    auto costs = table.costs(j);
    for (std::size_t t = 0; t < masks.size(); ++t) {
      const int k = set_size(masks[t]);
      if (k > max_size) continue;
      ++evaluations;
      auto& slot = best_cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
      if (costs[t] < slot) {
        slot = costs[t];
        best_mask[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = masks[t];
      }
    }
  }
  // value[j][b]: minimum over columns j..p-1 using at most b arcs.
  std::vector<std::vector<double>> value(static_cast<std::size_t>(p) + 1,
                                         std::vector<double>(static_cast<std::size_t>(budget) + 1, 0.0));
  std::vector<std::vector<int>> take(static_cast<std::size_t>(p),
                                     std::vector<int>(static_cast<std::size_t>(budget) + 1, 0));
  for (int j = p - 1; j >= 0; --j) {
    for (int b = 0; b <= budget; ++b) {
      double best = kInf;
      int arg = 0;
      for (int k = 0; k <= std::min(b, max_size); ++k) {
        const double v = best_cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] +
                         value[static_cast<std::size_t>(j) + 1][static_cast<std::size_t>(b - k)];
        if (v < best) {
          best = v;
          arg = k;
        }
      }
      value[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] = best;
      take[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] = arg;
    }
  }
  DirectedShape shape(p);
  std::vector<double> per_column(static_cast<std::size_t>(p));
  int b = budget;
  for (int j = 0; j < p; ++j) {
    const int k = take[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)];
    shape.set_neighborhood(j, best_mask[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
    per_column[static_cast<std::size_t>(j)] = best_cost[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    b -= k;
  }
  return make_outcome(shape, std::move(per_column), evaluations, true);
}

// Position of m_j in the size-then-lexicographic enumeration of the subsets
// of {0..p-1} \ {j}.
std::size_t standard_rank(int p, int j, VertexSet m_j) {
  static const auto binom = [] {
    std::vector<std::vector<std::uint64_t>> b(kMaxVertices + 1, std::vector<std::uint64_t>(kMaxVertices + 1, 0));
    for (int a = 0; a <= kMaxVertices; ++a) {
      b[static_cast<std::size_t>(a)][0] = 1;
      for (int c = 1; c <= a; ++c) {
        b[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] =
            b[static_cast<std::size_t>(a) - 1][static_cast<std::size_t>(c) - 1] +
            (c < a ? b[static_cast<std::size_t>(a) - 1][static_cast<std::size_t>(c)] : 0);
      }
    }
    return b;
  }();
  const int m = p - 1;
  const int k = set_size(m_j);
  std::uint64_t rank = 0;
  for (int d = 0; d < k; ++d) rank += binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(d)];
  int previous = -1;
  int i = 0;
  for (int v : set_members(m_j)) {
    const int pos = v < j ? v : v - 1;
    ++i;
    for (int u = previous + 1; u < pos; ++u) {
      rank += binom[static_cast<std::size_t>(m - 1 - u)][static_cast<std::size_t>(k - i)];
    }
    previous = pos;
  }
  return static_cast<std::size_t>(rank);
}

}  // namespace

// --- CostTable ----------------------------------------------------------------

CostTable::CostTable(int p, int max_size)
    : p_(p), max_size_(max_size), masks_(static_cast<std::size_t>(p)), costs_(static_cast<std::size_t>(p)) {
  if (p < 1 || p > kMaxVertices) throw DomainError("cost table: p out of range");
  if (max_size < 0 || max_size > p - 1) throw DomainError("cost table: max_size must lie in [0, p - 1]");
}

void CostTable::append(int j, VertexSet m_j, double cost) {
  masks_[static_cast<std::size_t>(j)].push_back(m_j);
  costs_[static_cast<std::size_t>(j)].push_back(cost);
}

double CostTable::lookup(int j, VertexSet m_j) const {
  const auto& masks = masks_[static_cast<std::size_t>(j)];
  const std::size_t rank = standard_rank(p_, j, m_j);
  if (rank < masks.size() && masks[rank] == m_j) return costs_[static_cast<std::size_t>(j)][rank];
  auto it = std::find(masks.begin(), masks.end(), m_j);
  if (it == masks.end()) throw DomainError("cost table has no entry for this neighborhood");
  return costs_[static_cast<std::size_t>(j)][static_cast<std::size_t>(it - masks.begin())];
}

bool CostTable::complete() const {
  const double expected = neighborhood_count(p_, max_size_);
  for (const auto& column : masks_) {
    if (static_cast<double>(column.size()) != expected) return false;
  }
  return true;
}

// --- Searches -----------------------------------------------------------------

SearchOutcome search_exhaustive(const CollectionSpec& spec, const ColumnCost& cost, double cap) {
  MemoCost memo(spec.p, cost);
  double best = kInf;
  DirectedShape best_shape(spec.p);
  std::uint64_t evaluations = 0;
  for_each_shape(
      spec,
      [&](const DirectedShape& m) {
        ++evaluations;
        double total = 0.0;
        for (int j = 0; j < spec.p; ++j) total += memo(j, m.neighborhood(j));
        if (total < best) {
          best = total;
          best_shape = m;
        }
      },
      cap);
  std::vector<double> per_column(static_cast<std::size_t>(spec.p));
  for (int j = 0; j < spec.p; ++j) per_column[static_cast<std::size_t>(j)] = memo(j, best_shape.neighborhood(j));
  return make_outcome(best_shape, std::move(per_column), evaluations, true);
}

SearchOutcome search_stepwise(const CollectionSpec& spec, const ColumnCost& cost) {
  const int p = spec.p;
  const int D = spec.D;
  MemoCost memo(p, cost);
  std::vector<VertexSet> m(static_cast<std::size_t>(p), 0);
  std::vector<double> current(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) current[static_cast<std::size_t>(j)] = memo(j, 0);
  std::uint64_t evaluations = 0;

  if (spec.family == Family::DegreeDirected) {
    for (int j = 0; j < p; ++j) {
      stepwise_column(j, p, spec.max_neighborhood(), memo, m[static_cast<std::size_t>(j)],
                      current[static_cast<std::size_t>(j)], evaluations);
    }
    return make_outcome(DirectedShape(p, m), std::move(current), evaluations, false);
  }

  const bool directed = is_directed(spec.family);
  int used = 0;  // edges or arcs in the current shape
  for (;;) {
    double best_delta = 0.0;
    int best_i = -1;
    int best_j = -1;
    for (int i = 0; i < p; ++i) {
      for (int j = directed ? 0 : i + 1; j < p; ++j) {
        if (i == j) continue;
        const auto iu = static_cast<std::size_t>(i);
        const auto ju = static_cast<std::size_t>(j);
        const bool present = (m[ju] & vertex_bit(i)) != 0;
        if (!present) {
          if (spec.family == Family::Degree &&
              (set_size(m[iu]) + 1 > D || set_size(m[ju]) + 1 > D)) {
            continue;
          }
          if ((spec.family == Family::EdgeCount || spec.family == Family::EdgeCountDirected) && used + 1 > D) continue;
        }
        ++evaluations;
        double delta = memo(j, m[ju] ^ vertex_bit(i)) - current[ju];
        if (!directed) delta += memo(i, m[iu] ^ vertex_bit(j)) - current[iu];
        if (delta < best_delta) {
          best_delta = delta;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_i < 0) break;
    const auto iu = static_cast<std::size_t>(best_i);
    const auto ju = static_cast<std::size_t>(best_j);
    const bool adding = (m[ju] & vertex_bit(best_i)) == 0;
    m[ju] ^= vertex_bit(best_i);
    current[ju] = memo(best_j, m[ju]);
    if (!directed) {
      m[iu] ^= vertex_bit(best_j);
      current[iu] = memo(best_i, m[iu]);
    }
    used += adding ? 1 : -1;
  }
  return make_outcome(DirectedShape(p, m), std::move(current), evaluations, false);
}

SearchOutcome search_decomposed(const CollectionSpec& spec, const CostTable& table) {
  if (spec.family != Family::DegreeDirected) {
    throw UsageError("column-wise decomposition applies only to the deg-directed family");
  }
  check_table(spec, table);
  const int max_size = spec.max_neighborhood();
  DirectedShape shape(spec.p);
  std::vector<double> per_column(static_cast<std::size_t>(spec.p));
  std::uint64_t evaluations = 0;
  for (int j = 0; j < spec.p; ++j) {
    auto masks = table.neighborhoods(j);
    auto costs = table.costs(j);
    double best = kInf;
    VertexSet arg = 0;
    for (std::size_t t = 0; t < masks.size(); ++t) {
      if (set_size(masks[t]) > max_size) break;  // table is ordered by size
      ++evaluations;
      if (costs[t] < best) {
        best = costs[t];
        arg = masks[t];
      }
    }
    shape.set_neighborhood(j, arg);
    per_column[static_cast<std::size_t>(j)] = best;
  }
  return make_outcome(shape, std::move(per_column), evaluations, true);
}

SearchOutcome search_exact(const CollectionSpec& spec, const CostTable& table, std::uint64_t node_budget) {
  check_table(spec, table);
  switch (spec.family) {
    case Family::DegreeDirected: return search_decomposed(spec, table);
    case Family::EdgeCountDirected: return search_arc_budget(spec, table);
    case Family::Degree:
    case Family::EdgeCount: return BranchAndBound(spec, table, node_budget).run();
  }
  throw UsageError("unknown family");
}

}  // namespace ggmsel
