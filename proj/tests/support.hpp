#pragma once

// Generators and brute-force oracles shared by the property tests. The
// oracles deliberately avoid the library's graph algorithms.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/digraph.hpp"

namespace lyapdecomp::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::string vertex_name(std::size_t i) { return std::string(1, static_cast<char>('a' + i)); }

/// Digraph on vertices a, b, ... whose edges are the set bits of `mask`
/// over the ordered pairs (i, j), i != j, in row-major order.
inline Digraph digraph_from_mask(std::size_t n, std::uint64_t mask) {
  Digraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_vertex(vertex_name(i));
  std::size_t bit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (mask >> bit & 1U) g.add_edge(vertex_name(i), vertex_name(j));
      ++bit;
    }
  }
  return g;
}

inline Digraph random_digraph(Rng& rng, std::size_t n, double p, bool self_loops) {
  Digraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_vertex(vertex_name(i));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !self_loops) continue;
      if (uniform(rng, 0.0, 1.0) < p) g.add_edge(vertex_name(i), vertex_name(j));
    }
  }
  return g;
}

/// Every elementary cycle by trying each vertex subset in each order that
/// starts at its smallest member.
inline std::set<std::vector<VertexId>> brute_force_cycles(const Digraph& g) {
  const std::vector<VertexId> vs(g.vertices().begin(), g.vertices().end());
  std::set<std::vector<VertexId>> out;
  const std::size_t n = vs.size();
  for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
    std::vector<VertexId> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (subset >> i & 1U) members.push_back(vs[i]);
    }
    std::vector<VertexId> rest(members.begin() + 1, members.end());
    do {
      std::vector<VertexId> order{members.front()};
      order.insert(order.end(), rest.begin(), rest.end());
      bool ok = true;
      for (std::size_t k = 0; k < order.size() && ok; ++k) {
        ok = g.has_edge(order[k], order[(k + 1) % order.size()]);
      }
      if (ok) out.insert(order);
    } while (std::next_permutation(rest.begin(), rest.end()));
  }
  return out;
}

/// Cycle vertices touching an edge that is not one of the cycle's own edges.
inline std::set<VertexId> brute_force_border(const std::vector<VertexId>& cycle, const Digraph& g) {
  std::set<std::pair<VertexId, VertexId>> own;
  for (std::size_t k = 0; k < cycle.size(); ++k) own.insert({cycle[k], cycle[(k + 1) % cycle.size()]});
  const std::set<VertexId> members(cycle.begin(), cycle.end());
  std::set<VertexId> border;
  for (const auto& e : g.edges()) {
    if (own.count(e)) continue;
    if (members.count(e.first)) border.insert(e.first);
    if (members.count(e.second)) border.insert(e.second);
  }
  return border;
}

inline std::size_t brute_force_in_degree(const Digraph& g, const VertexId& v) {
  std::size_t d = 0;
  for (const auto& e : g.edges()) d += e.second == v;
  return d;
}

inline std::size_t brute_force_out_degree(const Digraph& g, const VertexId& v) {
  std::size_t d = 0;
  for (const auto& e : g.edges()) d += e.first == v;
  return d;
}

inline Polyhedron random_box(Rng& rng, std::size_t n, double lo, double hi) {
  Eigen::VectorXd lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = uniform(rng, lo, hi), b = uniform(rng, lo, hi);
    lower(static_cast<Eigen::Index>(i)) = std::min(a, b);
    upper(static_cast<Eigen::Index>(i)) = std::max(a, b) + 0.1;
  }
  return Polyhedron::box(lower, upper);
}

/// Well-formed automaton with 1..max_modes modes over 1..2 variables,
/// random affine flows, box invariants and guards, parallel transitions and
/// self-loops allowed.
inline HybridAutomaton random_automaton(Rng& rng, std::size_t max_modes) {
  HybridAutomaton a;
  const std::size_t n = pick(rng, 1, 2);
  for (std::size_t i = 0; i < n; ++i) a.variables.names.push_back("x" + std::to_string(i));
  a.convergence_set = a.variables.names;
  const std::size_t modes = pick(rng, 1, max_modes);
  for (std::size_t i = 0; i < modes; ++i) {
    Mode m;
    m.id = "m" + std::to_string(i);
    const std::size_t vertices = pick(rng, 1, 2);
    for (std::size_t k = 0; k < vertices; ++k) {
      AffineMap f{Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n)};
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) f.matrix(r, c) = std::round(uniform(rng, -3, 3));
        f.offset(r) = std::round(uniform(rng, -2, 2));
      }
      m.flow.vertices.push_back(std::move(f));
    }
    m.invariant = random_box(rng, n, -10, 10);
    m.converging_vars = a.variables.names;
    a.modes.push_back(std::move(m));
  }
  const std::size_t transitions = pick(rng, 0, 3 * modes);
  for (std::size_t k = 0; k < transitions; ++k) {
    Transition t;
    t.id = "t" + std::to_string(k);
    t.source = a.modes[pick(rng, 0, modes - 1)].id;
    t.target = a.modes[pick(rng, 0, modes - 1)].id;
    t.guard = random_box(rng, n, -5, 5);
    t.update = AffineMap::identity(n);
    if (uniform(rng, 0, 1) < 0.5) t.update.matrix *= std::round(uniform(rng, 1, 3)) / 4.0;
    a.transitions.push_back(std::move(t));
  }
  return a;
}

}  // namespace lyapdecomp::testing
