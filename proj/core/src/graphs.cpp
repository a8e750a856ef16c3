#include "ggmsel/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "ggmsel/error.hpp"

namespace ggmsel {
namespace {

void check_vertex_count(int p) {
  if (p < 0 || p > kMaxVertices) {
    throw DomainError("vertex count must lie in [0, " + std::to_string(kMaxVertices) + "], got " +
                      std::to_string(p));
  }
}

void check_pair(int p, int i, int j) {
  if (i < 0 || j < 0 || i >= p || j >= p) throw DomainError("vertex index out of range");
  if (i == j) throw DomainError("self-loops are not allowed");
}

// Visits all k-combinations of `items` in lexicographic order of positions.
template <class T, class F>
void for_each_combination(const std::vector<T>& items, int k, F&& visit) {
  const int m = static_cast<int>(items.size());
  if (k > m) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    visit(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int t = i + 1; t < k; ++t) idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

double binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  // Each partial product is itself a binomial coefficient, so it stays an
  // exact integer while below 2^53.
  double value = 1.0;
  for (int i = 1; i <= static_cast<int>(k); ++i) value = value * (n - k + i) / i;
  return std::round(value);
}

}  // namespace

std::vector<int> set_members(VertexSet s) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(set_size(s)));
  while (s != 0) {
    out.push_back(std::countr_zero(s));
    s &= s - 1;
  }
  return out;
}

// --- Graph -------------------------------------------------------------------

Graph::Graph(int p) : p_(p) {
  check_vertex_count(p);
  adj_.assign(static_cast<std::size_t>(p), 0);
}

Graph Graph::from_edges(int p, const std::vector<std::pair<int, int>>& edges) {
  Graph g(p);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

void Graph::add_edge(int i, int j) {
  check_pair(p_, i, j);
  adj_[static_cast<std::size_t>(i)] |= vertex_bit(j);
  adj_[static_cast<std::size_t>(j)] |= vertex_bit(i);
}

void Graph::remove_edge(int i, int j) {
  check_pair(p_, i, j);
  adj_[static_cast<std::size_t>(i)] &= ~vertex_bit(j);
  adj_[static_cast<std::size_t>(j)] &= ~vertex_bit(i);
}

bool Graph::has_edge(int i, int j) const {
  check_pair(p_, i, j);
  return (adj_[static_cast<std::size_t>(j)] & vertex_bit(i)) != 0;
}

int Graph::edge_count() const {
  int twice = 0;
  for (VertexSet s : adj_) twice += set_size(s);
  return twice / 2;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < p_; ++i) {
    const VertexSet above = adj_[static_cast<std::size_t>(i)] & ~((vertex_bit(i) << 1) - 1);
    for (int j : set_members(above)) out.emplace_back(i, j);
  }
  return out;
}

DirectedShape Graph::to_directed() const { return DirectedShape(p_, adj_); }

// --- DirectedShape -----------------------------------------------------------

DirectedShape::DirectedShape(int p) : p_(p) {
  check_vertex_count(p);
  in_.assign(static_cast<std::size_t>(p), 0);
}

DirectedShape::DirectedShape(int p, std::vector<VertexSet> neighborhoods) : p_(p), in_(std::move(neighborhoods)) {
  check_vertex_count(p);
  if (static_cast<int>(in_.size()) != p) throw DomainError("neighborhood count must equal p");
  for (int j = 0; j < p; ++j) set_neighborhood(j, in_[static_cast<std::size_t>(j)]);
}

void DirectedShape::set_neighborhood(int j, VertexSet m_j) {
  if (j < 0 || j >= p_) throw DomainError("vertex index out of range");
  const VertexSet valid = (p_ == kMaxVertices) ? ~VertexSet{0} : (vertex_bit(p_) - 1);
  if ((m_j & ~valid) != 0) throw DomainError("neighborhood references a vertex >= p");
  if ((m_j & vertex_bit(j)) != 0) throw DomainError("self-loops are not allowed");
  in_[static_cast<std::size_t>(j)] = m_j;
}

void DirectedShape::add_arc(int i, int j) {
  check_pair(p_, i, j);
  in_[static_cast<std::size_t>(j)] |= vertex_bit(i);
}

bool DirectedShape::has_arc(int i, int j) const {
  check_pair(p_, i, j);
  return (in_[static_cast<std::size_t>(j)] & vertex_bit(i)) != 0;
}

int DirectedShape::arc_count() const {
  int total = 0;
  for (VertexSet s : in_) total += set_size(s);
  return total;
}

std::vector<std::pair<int, int>> DirectedShape::arcs() const {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < p_; ++j) {
    for (int i : set_members(in_[static_cast<std::size_t>(j)])) out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool DirectedShape::is_symmetric() const {
  for (int j = 0; j < p_; ++j) {
    for (int i : set_members(in_[static_cast<std::size_t>(j)])) {
      if (!has_arc(j, i)) return false;
    }
  }
  return true;
}

Graph symmetrize(const DirectedShape& shape) {
  Graph g(shape.p());
  for (auto [i, j] : shape.arcs()) g.add_edge(i, j);
  return g;
}

int degree(const Graph& g) {
  int best = 0;
  for (int j = 0; j < g.p(); ++j) best = std::max(best, set_size(g.neighbors(j)));
  return best;
}

int degree(const DirectedShape& m) {
  int best = 0;
  for (int j = 0; j < m.p(); ++j) best = std::max(best, set_size(m.neighborhood(j)));
  return best;
}

// --- Families ----------------------------------------------------------------

bool is_directed(Family f) noexcept {
  return f == Family::EdgeCountDirected || f == Family::DegreeDirected;
}

std::string_view family_name(Family f) noexcept {
  switch (f) {
    case Family::EdgeCount: return "edges";
    case Family::Degree: return "deg";
    case Family::EdgeCountDirected: return "edges-directed";
    case Family::DegreeDirected: return "deg-directed";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::EdgeCount, Family::Degree, Family::EdgeCountDirected, Family::DegreeDirected}) {
    if (family_name(f) == name) return f;
  }
  throw UsageError("unknown family '" + std::string(name) +
                   "' (expected edges, deg, edges-directed or deg-directed)");
}

CollectionSpec::CollectionSpec(Family family_, int D_, int p_) : family(family_), D(D_), p(p_) {
  if (D < 1) throw DomainError("collection bound D must be >= 1");
  check_vertex_count(p);
  if (p < 2) throw DomainError("collection needs at least two vertices");
}

int CollectionSpec::max_neighborhood() const noexcept { return std::min(D, p - 1); }

bool contains(const CollectionSpec& spec, const Graph& g) {
  if (g.p() != spec.p || is_directed(spec.family)) return false;
  if (spec.family == Family::EdgeCount) return g.edge_count() <= spec.D;
  return degree(g) <= spec.D;
}

bool contains(const CollectionSpec& spec, const DirectedShape& m) {
  if (m.p() != spec.p) return false;
  if (!is_directed(spec.family)) return m.is_symmetric() && contains(spec, symmetrize(m));
  if (spec.family == Family::EdgeCountDirected) return m.arc_count() <= spec.D;
  return degree(m) <= spec.D;
}

// --- Enumeration -------------------------------------------------------------

void for_each_neighborhood(int p, int j, int D, const std::function<void(VertexSet)>& visit) {
  check_vertex_count(p);
  if (j < 0 || j >= p) throw DomainError("vertex index out of range");
  if (D > p - 1) throw DomainError("neighborhood bound D must not exceed p - 1");
  std::vector<int> candidates;
  for (int v = 0; v < p; ++v) {
    if (v != j) candidates.push_back(v);
  }
  for (int k = 0; k <= D; ++k) {
    for_each_combination(candidates, k, [&](const std::vector<int>& idx) {
      VertexSet s = 0;
      for (int t : idx) s |= vertex_bit(candidates[static_cast<std::size_t>(t)]);
      visit(s);
    });
  }
}

std::vector<VertexSet> enumerate_neighborhoods(int p, int j, int D) {
  std::vector<VertexSet> out;
  for_each_neighborhood(p, j, D, [&](VertexSet s) { out.push_back(s); });
  return out;
}

double neighborhood_count(int p, int D) {
  double total = 0.0;
  for (int d = 0; d <= std::min(D, p - 1); ++d) total += binomial(p - 1, d);
  return total;
}

double collection_size_estimate(const CollectionSpec& spec) {
  const double pairs = spec.p * (spec.p - 1) / 2.0;
  auto bounded_subsets = [](double m, double k_max) {
    double total = 0.0;
    for (int k = 0; k <= k_max && k <= m; ++k) total += binomial(m, k);
    return total;
  };
  switch (spec.family) {
    case Family::EdgeCount: return bounded_subsets(pairs, spec.D);
    case Family::EdgeCountDirected: return bounded_subsets(2.0 * pairs, spec.D);
    case Family::DegreeDirected: return std::pow(neighborhood_count(spec.p, spec.D), spec.p);
    case Family::Degree: {
      const double by_edges = bounded_subsets(pairs, std::floor(spec.p * spec.D / 2.0));
      const double by_columns = std::pow(neighborhood_count(spec.p, spec.D), spec.p);
      return std::min({by_edges, by_columns, std::pow(2.0, pairs)});
    }
  }
  return 0.0;
}

void for_each_shape(const CollectionSpec& spec, const std::function<void(const DirectedShape&)>& visit,
                    double cap) {
  const double estimate = collection_size_estimate(spec);
  if (estimate > cap) {
    std::ostringstream msg;
    msg << "collection too large to enumerate: about " << estimate << " members (cap " << cap << ")";
    throw CollectionTooLarge(msg.str(), estimate);
  }
  const int p = spec.p;
  switch (spec.family) {
    case Family::EdgeCount:
    case Family::EdgeCountDirected: {
      std::vector<std::pair<int, int>> slots;
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          if (i == j) continue;
          if (spec.family == Family::EdgeCount && j < i) continue;
          slots.emplace_back(i, j);
        }
      }
      const bool undirected = spec.family == Family::EdgeCount;
      for (int k = 0; k <= spec.D; ++k) {
        for_each_combination(slots, k, [&](const std::vector<int>& idx) {
          DirectedShape m(p);
          for (int t : idx) {
            auto [i, j] = slots[static_cast<std::size_t>(t)];
            m.add_arc(i, j);
            if (undirected) m.add_arc(j, i);
          }
          visit(m);
        });
      }
      return;
    }
    case Family::Degree: {
      std::vector<std::pair<int, int>> pairs;
      for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) pairs.emplace_back(i, j);
      }
      const int npairs = static_cast<int>(pairs.size());
      std::vector<int> deg(static_cast<std::size_t>(p), 0);
      DirectedShape m(p);
      // Size-then-lexicographic: for each edge count k, pick edges in
      // increasing pair order subject to the degree bound.
      std::function<void(int, int)> grow = [&](int start, int remaining) {
        if (remaining == 0) {
          visit(m);
          return;
        }
        for (int t = start; t <= npairs - remaining; ++t) {
          auto [i, j] = pairs[static_cast<std::size_t>(t)];
          auto& di = deg[static_cast<std::size_t>(i)];
          auto& dj = deg[static_cast<std::size_t>(j)];
          if (di >= spec.D || dj >= spec.D) continue;
          ++di;
          ++dj;
          m.add_arc(i, j);
          m.add_arc(j, i);
          grow(t + 1, remaining - 1);
          m.set_neighborhood(i, m.neighborhood(i) & ~vertex_bit(j));
          m.set_neighborhood(j, m.neighborhood(j) & ~vertex_bit(i));
          --di;
          --dj;
        }
      };
      const int max_edges = std::min(npairs, p * spec.D / 2);
      for (int k = 0; k <= max_edges; ++k) grow(0, k);
      return;
    }
    case Family::DegreeDirected: {
      const int D = spec.max_neighborhood();
      std::vector<std::vector<VertexSet>> lists;
      for (int j = 0; j < p; ++j) lists.push_back(enumerate_neighborhoods(p, j, D));
      DirectedShape m(p);
      std::function<void(int)> pick = [&](int j) {
        if (j == p) {
          visit(m);
          return;
        }
        for (VertexSet s : lists[static_cast<std::size_t>(j)]) {
          m.set_neighborhood(j, s);
          pick(j + 1);
        }
        m.set_neighborhood(j, 0);
      };
      pick(0);
      return;
    }
  }
}

std::vector<DirectedShape> enumerate_collection(const CollectionSpec& spec, double cap) {
  std::vector<DirectedShape> out;
  for_each_shape(spec, [&](const DirectedShape& m) { out.push_back(m); }, cap);
  return out;
}

}  // namespace ggmsel
