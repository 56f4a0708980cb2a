#include <gtest/gtest.h>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/digraph.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/relaxer.hpp"
#include "support.hpp"

namespace lyapdecomp {
namespace {

using testing::Rng;

Digraph make(const std::vector<std::string>& vs, const std::vector<std::pair<std::string, std::string>>& es) {
  Digraph g;
  for (const auto& v : vs) g.add_vertex(v);
  for (const auto& [a, b] : es) g.add_edge(a, b);
  return g;
}

Digraph complete(std::size_t n) { return underlying_digraph(generate_kn_fixture(n)); }

TEST(Digraph, SetSemantics) {
  Digraph g = make({"a", "b"}, {{"a", "b"}, {"a", "b"}, {"b", "b"}});
  EXPECT_EQ(g.edge_count(), 2U);
  EXPECT_EQ(g.in_degree("b"), 2U);
  EXPECT_EQ(g.out_degree("b"), 1U);
  EXPECT_THROW(g.add_edge("a", "zz"), std::invalid_argument);
  g.remove_vertex("b");
  EXPECT_EQ(g.edge_count(), 0U);
}

TEST(Scc, DirectedK3IsOneComponent) {
  const auto scc = scc_decompose(complete(3));
  ASSERT_EQ(scc.components.size(), 1U);
  EXPECT_EQ(scc.components[0].size(), 3U);
}

TEST(Scc, SingleEdgeGivesTwoSingletons) {
  const auto scc = scc_decompose(make({"a", "b"}, {{"a", "b"}}));
  ASSERT_EQ(scc.components.size(), 2U);
  EXPECT_EQ(scc.components[0], std::vector<VertexId>{"a"});
  EXPECT_EQ(scc.components[1], std::vector<VertexId>{"b"});
  EXPECT_EQ(scc.condensation_edges.size(), 1U);
  EXPECT_TRUE(scc.condensation_edges.count({0, 1}));
}

TEST(Scc, SpidercamIsOneComponentOfNine) {
  const auto scc = scc_decompose(underlying_digraph(generate_spidercam_fixture()));
  ASSERT_EQ(scc.components.size(), 1U);
  EXPECT_EQ(scc.components[0].size(), 9U);
}

// Mutual reachability by repeated squaring of the adjacency relation.
std::map<VertexId, std::set<VertexId>> reach_oracle(const Digraph& g) {
  std::map<VertexId, std::set<VertexId>> r;
  for (const auto& v : g.vertices()) r[v] = {v};
  for (const auto& [a, b] : g.edges()) r[a].insert(b);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [v, out] : r) {
      const auto snapshot = out;
      for (const auto& w : snapshot) {
        for (const auto& x : r[w]) changed |= out.insert(x).second;
      }
    }
  }
  return r;
}

TEST(SccProperty, MatchesReachabilityOracleAndIsTopological) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const Digraph g = testing::random_digraph(rng, testing::pick(rng, 1, 7), testing::uniform(rng, 0.05, 0.5), true);
    const auto scc = scc_decompose(g);
    const auto reach = reach_oracle(g);
    for (const auto& u : g.vertices()) {
      for (const auto& v : g.vertices()) {
        const bool same = reach.at(u).count(v) && reach.at(v).count(u);
        EXPECT_EQ(same, scc.component_of.at(u) == scc.component_of.at(v));
      }
    }
    for (const auto& [a, b] : g.edges()) {
      EXPECT_LE(scc.component_of.at(a), scc.component_of.at(b));
    }
    for (const auto& [i, j] : scc.condensation_edges) EXPECT_LT(i, j);
  }
}

std::set<std::vector<VertexId>> as_set(const std::vector<Cycle>& cycles) {
  std::set<std::vector<VertexId>> s;
  for (const auto& c : cycles) s.insert(c.vertices);
  return s;
}

TEST(Cycles, DirectedK3HasFive) {
  const auto cycles = enumerate_simple_cycles(complete(3));
  EXPECT_EQ(cycles.size(), 5U);
  EXPECT_EQ(as_set(cycles), testing::brute_force_cycles(complete(3)));
  std::size_t two = 0, three = 0;
  for (const auto& c : cycles) (c.length() == 2 ? two : three) += 1;
  EXPECT_EQ(two, 3U);
  EXPECT_EQ(three, 2U);
}

TEST(Cycles, OneWayTriangle) {
  const auto cycles = enumerate_simple_cycles(make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}}));
  ASSERT_EQ(cycles.size(), 1U);
  EXPECT_EQ(cycles[0].vertices, (std::vector<VertexId>{"a", "b", "c"}));
}

TEST(Cycles, OverflowIsSignalled) {
  EXPECT_THROW(enumerate_simple_cycles(complete(5), 10), CycleOverflow);
}

TEST(CyclesProperty, MatchesBruteForceAndIsOrdered) {
  Rng rng(22);
  for (int trial = 0; trial < 400; ++trial) {
    const Digraph g = testing::random_digraph(rng, testing::pick(rng, 1, 6), testing::uniform(rng, 0.1, 0.7), true);
    const auto cycles = enumerate_simple_cycles(g);
    EXPECT_EQ(as_set(cycles), testing::brute_force_cycles(g)) << "trial " << trial;
    EXPECT_EQ(cycles.size(), as_set(cycles).size());
    for (std::size_t k = 0; k < cycles.size(); ++k) {
      const auto& vs = cycles[k].vertices;
      EXPECT_EQ(std::set<VertexId>(vs.begin(), vs.end()).size(), vs.size());
      EXPECT_EQ(vs.front(), *std::min_element(vs.begin(), vs.end()));
      for (const auto& [a, b] : cycles[k].edges()) EXPECT_TRUE(g.has_edge(a, b));
      if (k > 0) EXPECT_TRUE(cycle_order(cycles[k - 1], cycles[k]));
    }
  }
}

// The relaxed K_n as a multigraph: one edge per split part, labeled by it.
std::pair<std::vector<VertexId>, std::vector<LabeledEdge>> relaxed_star(std::size_t n) {
  const HybridAutomaton k = generate_kn_fixture(n);
  std::set<std::string> all;
  for (const auto& m : k.modes) all.insert(m.id);
  const RelaxResult r = relax(k, all);
  std::vector<VertexId> vs;
  for (const auto& m : r.automaton.modes) vs.push_back(m.id);
  std::vector<LabeledEdge> es;
  for (const auto& t : r.automaton.transitions) es.push_back({t.source, t.target, t.id});
  return {vs, es};
}

TEST(Cycles, RelaxedStarWithoutConcentration) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto [vs, es] = relaxed_star(n);
    EXPECT_EQ(enumerate_simple_cycles(vs, es, false).size(), n * (n - 1) * (n - 1)) << n;
  }
}

TEST(Cycles, RelaxedStarWithConcentration) {
  for (std::size_t n = 1; n <= 5; ++n) {
    const auto [vs, es] = relaxed_star(n);
    EXPECT_EQ(enumerate_simple_cycles(vs, es, true).size(), n == 1 ? 0U : n) << n;
  }
}

TEST(Cycles, ConcentrationKeepsFirstLabel) {
  const std::vector<VertexId> vs{"a", "b"};
  const std::vector<LabeledEdge> es{{"a", "b", "t2"}, {"a", "b", "t1"}, {"b", "a", "t3"}};
  const auto c = enumerate_simple_cycles(vs, es, true);
  ASSERT_EQ(c.size(), 1U);
  EXPECT_EQ(c[0].labels, (std::vector<std::string>{"t2", "t3"}));
  EXPECT_EQ(enumerate_simple_cycles(vs, es, false).size(), 2U);
}

TEST(Density, Formula) {
  EXPECT_DOUBLE_EQ(graph_density(complete(3)), 1.0);
  EXPECT_DOUBLE_EQ(graph_density(underlying_digraph(generate_spidercam_fixture())), 32.0 / 72.0);
  EXPECT_DOUBLE_EQ(graph_density(generate_acc_skeleton()), 11.0 / 30.0);
  EXPECT_DOUBLE_EQ(graph_density(make({"a", "b"}, {{"a", "a"}, {"a", "b"}})), 0.5);
  EXPECT_THROW(graph_density(make({"a"}, {})), UndefinedDensity);
}

TEST(DensityProperty, CompleteGraphsAreDense) {
  for (std::size_t n = 2; n <= 6; ++n) EXPECT_DOUBLE_EQ(graph_density(complete(n)), 1.0) << n;
}

TEST(DenseSubcomponent, Examples) {
  const auto k5 = find_dense_subcomponent(complete(5), 0.5);
  ASSERT_TRUE(k5);
  EXPECT_EQ(k5->size(), 5U);
  EXPECT_FALSE(find_dense_subcomponent(make({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}), 0.5));
  const auto spider = find_dense_subcomponent(underlying_digraph(generate_spidercam_fixture()), 0.4);
  ASSERT_TRUE(spider);
  EXPECT_EQ(spider->size(), 9U);
  // Whole-graph density 11/30 is below 0.4, but peeling one vertex of total
  // degree <= 3 leaves >= 8 edges on 5 vertices, which meets it.
  const auto acc = find_dense_subcomponent(generate_acc_skeleton(), 0.4);
  ASSERT_TRUE(acc);
  EXPECT_EQ(*acc, (std::vector<VertexId>{"v2", "v3", "v4", "v5", "v6"}));
  EXPECT_FALSE(find_dense_subcomponent(generate_acc_skeleton(), 0.7));
}

TEST(DenseSubcomponentProperty, ResultMeetsThreshold) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const Digraph g = testing::random_digraph(rng, testing::pick(rng, 2, 9), testing::uniform(rng, 0.1, 0.9), true);
    const double threshold = testing::uniform(rng, 0.2, 1.0);
    const auto r = find_dense_subcomponent(g, threshold);
    if (!r) continue;
    EXPECT_GE(r->size(), kMinDenseSize);
    EXPECT_GE(graph_density(g.induced({r->begin(), r->end()})), threshold);
  }
}

TEST(Border, Examples) {
  const Cycle tri{{"a", "b", "c"}};
  const std::vector<std::pair<std::string, std::string>> tri_edges{{"a", "b"}, {"b", "c"}, {"c", "a"}};
  EXPECT_TRUE(border_vertices(tri, make({"a", "b", "c"}, tri_edges)).empty());
  auto with_x = tri_edges;
  with_x.push_back({"x", "a"});
  const Digraph gx = make({"a", "b", "c", "x"}, with_x);
  EXPECT_EQ(border_vertices(tri, gx), (std::set<VertexId>{"a"}));
  EXPECT_TRUE(is_outer_cycle(tri, gx));
  // Triangles abc and abd share the edge a->b.
  const Digraph two = make({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}, {"b", "d"}, {"d", "a"}});
  EXPECT_EQ(border_vertices(tri, two), (std::set<VertexId>{"a", "b"}));
  EXPECT_EQ(border_vertices(Cycle{{"a", "b", "d"}}, two), (std::set<VertexId>{"a", "b"}));
  EXPECT_FALSE(is_outer_cycle(tri, two));
}

TEST(BorderProperty, MatchesOracle) {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const Digraph g = testing::random_digraph(rng, testing::pick(rng, 2, 6), 0.4, false);
    for (const auto& c : enumerate_simple_cycles(g)) {
      EXPECT_EQ(border_vertices(c, g), testing::brute_force_border(c.vertices, g));
    }
  }
}

}  // namespace
}  // namespace lyapdecomp
