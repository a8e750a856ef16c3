#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string_view>
#include <utility>
#include <vector>

namespace ggmsel {

/// Bit set over vertex indices 0..63. Internal indices are 0-based; every
/// external format uses 1-based labels.
using VertexSet = std::uint64_t;

inline constexpr int kMaxVertices = 64;

inline constexpr VertexSet vertex_bit(int v) noexcept { return VertexSet{1} << v; }
inline int set_size(VertexSet s) noexcept { return std::popcount(s); }

/// Members of `s` in increasing order.
std::vector<int> set_members(VertexSet s);

class DirectedShape;

/// Undirected graph on p labeled vertices, stored as symmetric adjacency sets.
class Graph {
 public:
  explicit Graph(int p = 0);
  static Graph from_edges(int p, const std::vector<std::pair<int, int>>& edges);

  int p() const noexcept { return p_; }
  void add_edge(int i, int j);
  void remove_edge(int i, int j);
  bool has_edge(int i, int j) const;
  VertexSet neighbors(int j) const { return adj_[static_cast<std::size_t>(j)]; }
  int edge_count() const;
  /// Sorted (i, j) pairs with i < j, 0-based.
  std::vector<std::pair<int, int>> edges() const;
  /// The symmetric directed shape with m_j = g_j.
  DirectedShape to_directed() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int p_;
  std::vector<VertexSet> adj_;
};

/// Directed graph without self-loops. An arc (i, j) means i belongs to the
/// neighborhood m_j, i.e. X^(i) is allowed as a predictor of X^(j).
class DirectedShape {
 public:
  explicit DirectedShape(int p = 0);
  DirectedShape(int p, std::vector<VertexSet> neighborhoods);

  int p() const noexcept { return p_; }
  VertexSet neighborhood(int j) const { return in_[static_cast<std::size_t>(j)]; }
  void set_neighborhood(int j, VertexSet m_j);
  void add_arc(int i, int j);
  bool has_arc(int i, int j) const;
  int arc_count() const;
  /// Sorted (i, j) arcs, 0-based.
  std::vector<std::pair<int, int>> arcs() const;
  bool is_symmetric() const;
  const std::vector<VertexSet>& neighborhoods() const noexcept { return in_; }

  friend bool operator==(const DirectedShape&, const DirectedShape&) = default;

 private:
  int p_;
  std::vector<VertexSet> in_;
};

/// Union of arcs, forgetting direction.
Graph symmetrize(const DirectedShape& shape);

int degree(const Graph& g);
int degree(const DirectedShape& m);

enum class Family {
  EdgeCount,          // graphs with at most D edges
  Degree,             // graphs with degree at most D
  EdgeCountDirected,  // directed graphs with at most D arcs
  DegreeDirected,     // directed graphs with every |m_j| <= D
};

bool is_directed(Family f) noexcept;
/// CLI spelling: edges, deg, edges-directed, deg-directed.
std::string_view family_name(Family f) noexcept;
Family parse_family(std::string_view name);

/// A candidate collection: one of the four families, its bound D and the
/// vertex count p.
struct CollectionSpec {
  CollectionSpec(Family family, int D, int p);

  Family family;
  int D;
  int p;

  /// Largest neighborhood size any member can have.
  int max_neighborhood() const noexcept;
};

bool contains(const CollectionSpec& spec, const Graph& g);
/// Undirected families hold a directed shape when it is symmetric and its
/// symmetrization belongs to the family.
bool contains(const CollectionSpec& spec, const DirectedShape& m);

/// Calls visit(m_j) for every subset of {0..p-1} \ {j} with at most D
/// elements, by size then lexicographically.
void for_each_neighborhood(int p, int j, int D, const std::function<void(VertexSet)>& visit);
std::vector<VertexSet> enumerate_neighborhoods(int p, int j, int D);
/// sum_{d <= D} C(p - 1, d), as a double to survive large arguments.
double neighborhood_count(int p, int D);

/// Number of members of the collection; exact for all families except
/// Degree, where it is an upper bound.
double collection_size_estimate(const CollectionSpec& spec);

inline constexpr double kDefaultEnumerationCap = 1e7;

/// Visits every member of the collection exactly once in a fixed order.
/// Undirected members are passed as their symmetric directed shape. Throws
/// CollectionTooLarge when the size estimate exceeds `cap`.
void for_each_shape(const CollectionSpec& spec, const std::function<void(const DirectedShape&)>& visit,
                    double cap = kDefaultEnumerationCap);
std::vector<DirectedShape> enumerate_collection(const CollectionSpec& spec,
                                                double cap = kDefaultEnumerationCap);

}  // namespace ggmsel
