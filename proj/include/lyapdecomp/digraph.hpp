#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lyapdecomp {

using VertexId = std::string;

/// Simple directed graph with set semantics: no parallel edges, self-loops
/// allowed.
class Digraph {
 public:
  Digraph() = default;

  void add_vertex(const VertexId& v);
  /// Both endpoints must already be vertices.
  void add_edge(const VertexId& from, const VertexId& to);
  void remove_vertex(const VertexId& v);

  bool has_vertex(const VertexId& v) const { return vertices_.count(v) != 0; }
  bool has_edge(const VertexId& from, const VertexId& to) const;

  const std::set<VertexId>& vertices() const { return vertices_; }
  const std::set<std::pair<VertexId, VertexId>>& edges() const { return edges_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t self_loop_count() const;

  std::vector<VertexId> successors(const VertexId& v) const;
  std::vector<VertexId> predecessors(const VertexId& v) const;
  /// Degrees count self-loops on both sides.
  std::size_t in_degree(const VertexId& v) const;
  std::size_t out_degree(const VertexId& v) const;

  /// Subgraph induced by `keep`.
  Digraph induced(const std::set<VertexId>& keep) const;
  Digraph without_self_loops() const;

  bool operator==(const Digraph&) const = default;

 private:
  std::set<VertexId> vertices_;
  std::set<std::pair<VertexId, VertexId>> edges_;
  std::map<VertexId, std::set<VertexId>> out_;
  std::map<VertexId, std::set<VertexId>> in_;
};

/// An elementary cycle, stored from its lexicographically smallest vertex.
/// Length 1 is a self-loop.
struct Cycle {
  std::vector<VertexId> vertices;

  std::size_t length() const { return vertices.size(); }
  bool contains(const VertexId& v) const;
  /// Consecutive pairs including last -> first.
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  bool operator==(const Cycle&) const = default;
};

/// Rotates so that the smallest vertex comes first.
Cycle normalized_cycle(std::vector<VertexId> vertices);
/// Shorter first, then lexicographic.
bool cycle_order(const Cycle& lhs, const Cycle& rhs);

struct SccDecomposition {
  /// Components in topological order of the condensation (sources first);
  /// vertices inside a component are sorted.
  std::vector<std::vector<VertexId>> components;
  std::map<VertexId, std::size_t> component_of;
  std::set<std::pair<std::size_t, std::size_t>> condensation_edges;
};

SccDecomposition scc_decompose(const Digraph& g);

class CycleOverflow : public std::runtime_error {
 public:
  CycleOverflow(std::size_t limit)
      : std::runtime_error("cycle enumeration exceeded the limit of " +
                           std::to_string(limit) + " cycles"),
        limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

inline constexpr std::size_t kDefaultCycleLimit = 1'000'000;

/// All elementary cycles (self-loops included), each once, ordered by
/// cycle_order. Throws CycleOverflow once more than `max_cycles` are found.
std::vector<Cycle> enumerate_simple_cycles(const Digraph& g,
                                           std::size_t max_cycles = kDefaultCycleLimit);

/// Edge of a multigraph; parallel edges are distinguished by label.
struct LabeledEdge {
  VertexId source;
  VertexId target;
  std::string label;
};

struct EdgeCycle {
  Cycle vertices;
  /// Label of the edge taken out of each vertex, aligned with vertices.
  std::vector<std::string> labels;
};

/// Cycles of a multigraph. With `concentrate` set, parallel edges count as one
/// and the first label (in input order) represents them; otherwise every
/// choice of parallel edge along a vertex cycle is a distinct cycle.
std::vector<EdgeCycle> enumerate_simple_cycles(const std::vector<VertexId>& vertices,
                                               const std::vector<LabeledEdge>& edges,
                                               bool concentrate,
                                               std::size_t max_cycles = kDefaultCycleLimit);

class UndefinedDensity : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |E| / (|V| (|V| - 1)) with self-loops left out of |E|.
/// Throws UndefinedDensity when |V| < 2.
double graph_density(const Digraph& g);

inline constexpr double kDefaultDensityThreshold = 0.4;
inline constexpr std::size_t kMinDenseSize = 3;

/// Greedy peeling: repeatedly drop the vertex of least total degree (ties to
/// the smallest id). Returns the largest set met along the way with at least
/// three vertices and induced density >= threshold.
std::optional<std::vector<VertexId>> find_dense_subcomponent(const Digraph& g, double threshold);

/// Vertices of `c` touching an edge of `g` that is not one of the cycle's own
/// edges. The cycle is an outer cycle iff the result has at most one element.
std::set<VertexId> border_vertices(const Cycle& c, const Digraph& g);

inline bool is_outer_cycle(const Cycle& c, const Digraph& g) {
  return border_vertices(c, g).size() <= 1;
}

}  // namespace lyapdecomp
