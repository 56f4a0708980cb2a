#include <gtest/gtest.h>

#include <algorithm>

#include "lyapdecomp/certifier.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/linprog.hpp"
#include "lyapdecomp/relaxer.hpp"
#include "support.hpp"

namespace lyapdecomp {
namespace {

using testing::Rng;

std::set<std::string> all_modes(const HybridAutomaton& a) {
  std::set<std::string> s;
  for (const auto& m : a.modes) s.insert(m.id);
  return s;
}

std::size_t touching(const HybridAutomaton& a, const std::set<std::string>& dense) {
  return static_cast<std::size_t>(std::count_if(a.transitions.begin(), a.transitions.end(), [&](const Transition& t) {
    return dense.count(t.source) || dense.count(t.target);
  }));
}

std::set<std::string> random_dense(Rng& rng, const HybridAutomaton& a) {
  std::set<std::string> s;
  for (const auto& m : a.modes) {
    if (testing::uniform(rng, 0, 1) < 0.5) s.insert(m.id);
  }
  if (s.empty()) s.insert(a.modes[testing::pick(rng, 0, a.modes.size() - 1)].id);
  return s;
}

TEST(Relax, CompleteTriangle) {
  const RelaxResult r = relax(generate_kn_fixture(3), {"m1", "m2", "m3"});
  EXPECT_EQ(r.automaton.modes.size(), 4U);
  EXPECT_EQ(r.automaton.transitions.size(), 12U);
  ASSERT_EQ(r.registry.pairs.size(), 6U);
  EXPECT_EQ(r.registry.central_mode, "m_c");
  EXPECT_TRUE(std::is_sorted(r.registry.pairs.begin(), r.registry.pairs.end(),
                             [](const auto& l, const auto& s) { return l.origin < s.origin; }));
  EXPECT_TRUE(validate_automaton(r.automaton).empty());
}

TEST(Relax, SingleTransition) {
  const RelaxResult r = relax(generate_kn_fixture(2), {"m1"});
  // Both t_1_2 and t_2_1 touch m1.
  EXPECT_EQ(r.registry.pairs.size(), 2U);
  const SplitTransitionPair* p = r.registry.find("t_1_2");
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->first.id, "t_1_2#to_c");
  EXPECT_EQ(p->first.source, "m1");
  EXPECT_EQ(p->first.target, "m_c");
  EXPECT_TRUE(p->first.update.is_identity());
  EXPECT_EQ(p->second.id, "t_1_2#from_c");
  EXPECT_EQ(p->second.source, "m_c");
  EXPECT_EQ(p->second.target, "m2");
}

TEST(Relax, CentralModeIsVacuous) {
  const RelaxResult r = relax(generate_kn_fixture(3), {"m1"});
  const Mode* mc = r.automaton.find_mode("m_c");
  ASSERT_NE(mc, nullptr);
  EXPECT_TRUE(is_empty(mc->invariant));
  EXPECT_EQ(mc->flow, AffineDynamics::zero(1));
}

TEST(Relax, CentralModeAvoidsExistingIds) {
  HybridAutomaton a = generate_kn_fixture(2);
  a.modes[0].id = "m_c";
  for (auto& t : a.transitions) {
    if (t.source == "m1") t.source = "m_c";
    if (t.target == "m1") t.target = "m_c";
  }
  EXPECT_EQ(relax(a, {"m2"}).registry.central_mode, "m_c#1");
}

TEST(Relax, RejectsBadDenseSets) {
  EXPECT_THROW(relax(generate_kn_fixture(2), {}), std::invalid_argument);
  EXPECT_THROW(relax(generate_kn_fixture(2), {"nope"}), std::invalid_argument);
}

TEST(Relax, IsolatedModeLeavesCentralModeUnconnected) {
  const RelaxResult r = relax(generate_scalar_fixture(-1.0), {"m1"});
  EXPECT_TRUE(r.registry.pairs.empty());
  EXPECT_EQ(r.automaton.modes.size(), 2U);
  EXPECT_TRUE(r.automaton.transitions.empty());
}

TEST(Reconstruct, OnePairOfSix) {
  const HybridAutomaton k3 = generate_kn_fixture(3);
  const RelaxResult r = relax(k3, all_modes(k3));
  const RelaxResult back = reconstruct(r.automaton, r.registry, "t_2_3");
  EXPECT_EQ(back.automaton.transitions.size(), 11U);
  EXPECT_EQ(back.registry.pairs.size(), 5U);
  EXPECT_EQ(*back.automaton.find_transition("t_2_3"), *k3.find_transition("t_2_3"));
  EXPECT_TRUE(back.automaton.find_mode("m_c"));
  EXPECT_THROW(reconstruct(back.automaton, back.registry, "t_2_3"), std::invalid_argument);
}

TEST(RelaxProperty, CountLaw) {
  Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 5);
    const auto dense = random_dense(rng, a);
    const RelaxResult r = relax(a, dense);
    const std::size_t st = touching(a, dense);
    EXPECT_EQ(r.automaton.modes.size(), a.modes.size() + 1);
    EXPECT_EQ(r.automaton.transitions.size(), a.transitions.size() + st);
    EXPECT_EQ(r.registry.pairs.size(), st);
  }
}

TEST(RelaxProperty, ReconstructingEveryPairInAnyOrderRestoresTheAutomaton) {
  Rng rng(72);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 5);
    RelaxResult r = relax(a, random_dense(rng, a));
    if (r.registry.pairs.empty()) continue;
    std::vector<std::string> order;
    for (const auto& p : r.registry.pairs) order.push_back(p.origin);
    std::shuffle(order.begin(), order.end(), rng);
    for (const auto& o : order) r = reconstruct(r.automaton, r.registry, o);
    EXPECT_EQ(r.automaton, a) << trial;
    EXPECT_TRUE(r.registry.pairs.empty());
  }
}

TEST(RelaxProperty, EveryOriginalJumpHasARelaxedRoute) {
  Rng rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 5);
    const RelaxResult r = relax(a, random_dense(rng, a));
    const std::string& mc = r.registry.central_mode;
    for (const auto& t : a.transitions) {
      if (const SplitTransitionPair* p = r.registry.find(t.id)) {
        EXPECT_EQ(p->first.source, t.source);
        EXPECT_EQ(p->first.target, mc);
        EXPECT_EQ(p->second.source, mc);
        EXPECT_EQ(p->second.target, t.target);
        EXPECT_EQ(p->first.guard, t.guard);
        EXPECT_EQ(p->second.guard, t.guard);
        EXPECT_TRUE(p->first.update.is_identity());
        EXPECT_EQ(p->second.update, t.update);
        // x in G, then U x: the route applies the original update.
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(a.dimension()), 0.5);
        EXPECT_EQ(p->second.update.apply(p->first.update.apply(x)), t.update.apply(x));
      } else {
        EXPECT_EQ(*r.automaton.find_transition(t.id), t);
      }
    }
  }
}

TEST(Tagging, RemovesSpuriousCompositions) {
  const HybridAutomaton k3 = generate_kn_fixture(3);
  const RelaxResult r = relax(k3, all_modes(k3));
  const CompositionCount before = count_compositions(r.automaton, r.registry);
  EXPECT_EQ(before.composable, 36U);
  EXPECT_EQ(before.spurious, 30U);
  const HybridAutomaton tagged = tag_split_transitions(r.automaton, r.registry);
  EXPECT_EQ(tagged.dimension(), 2U);
  EXPECT_TRUE(validate_automaton(tagged).empty());
  const CompositionCount after = count_compositions(tagged, r.registry);
  EXPECT_EQ(after.composable, 6U);
  EXPECT_EQ(after.spurious, 0U);
}

TEST(Tagging, TwoPairs) {
  const RelaxResult r = relax(generate_kn_fixture(2), {"m1", "m2"});
  const CompositionCount c = count_compositions(tag_split_transitions(r.automaton, r.registry), r.registry);
  EXPECT_EQ(c.composable, 2U);
  EXPECT_EQ(c.spurious, 0U);
  EXPECT_THROW(tag_split_transitions(generate_kn_fixture(2), SplitRegistry{}), std::invalid_argument);
}

TEST(ResolveDense, Specs) {
  const HybridAutomaton s = generate_spidercam_fixture();
  EXPECT_EQ(resolve_dense(s, "all").size(), 9U);
  EXPECT_TRUE(resolve_dense(s, "none").empty());
  EXPECT_EQ(resolve_dense(s, "auto").size(), 9U);
  EXPECT_EQ(resolve_dense(automaton_from_digraph(generate_acc_skeleton()), "auto").size(), 5U);
  EXPECT_TRUE(resolve_dense(automaton_from_digraph(generate_acc_skeleton()), "auto", 0.7).empty());
  EXPECT_EQ(resolve_dense(generate_kn_fixture(3), "m1,m3"), (std::set<std::string>{"m1", "m3"}));
  EXPECT_THROW(resolve_dense(generate_kn_fixture(3), "m1,zz"), std::invalid_argument);
  EXPECT_THROW(resolve_dense(generate_kn_fixture(3), ","), std::invalid_argument);
}

TEST(IntegratedProve, OverlapNeedsReconstruction) {
  const HybridAutomaton a = generate_overlap_fixture();
  const auto dense = all_modes(a);
  const std::size_t pairs = relax(a, dense).registry.pairs.size();
  const DecompositionResult r = integrated_prove(a, dense);
  ASSERT_EQ(r.verdict, Verdict::kStable) << r.diagnostic;
  EXPECT_GE(r.reconstructions, 1U);
  EXPECT_LE(r.reconstructions, pairs);
  EXPECT_EQ(r.trace.count(StepKind::kReconstruct), r.reconstructions);
  EXPECT_EQ(r.trace.count(StepKind::kRelax), 1U);
  const auto& c = *r.certificate;
  EXPECT_TRUE(check_certificate_exact(c.problem, c.certificate).pass);
  EXPECT_EQ(check_certificate_sampling(c.certified, c.certificate).status, SamplingStatus::kPass);
}

TEST(IntegratedProve, UnstableFails) {
  const HybridAutomaton a = fixture_by_name("unstable");
  const DecompositionResult r = integrated_prove(a, all_modes(a));
  EXPECT_EQ(r.verdict, Verdict::kFailed);
  EXPECT_TRUE(failed_subgraph_of(r).modes.count("m1"));
}

TEST(IntegratedProve, RelaxedK3NeedsNoReconstruction) {
  const HybridAutomaton a = generate_kn_fixture(3);
  const DecompositionResult r = integrated_prove(a, all_modes(a));
  ASSERT_EQ(r.verdict, Verdict::kStable) << r.diagnostic;
  EXPECT_EQ(r.reconstructions, 0U);
  EXPECT_EQ(r.trace.splittings, 0U);
  EXPECT_EQ(r.trace.reductions, 3U);
}

TEST(IntegratedProveProperty, RoundsAreBoundedByPairs) {
  Rng rng(74);
  for (int trial = 0; trial < 12; ++trial) {
    HybridAutomaton a = testing::random_automaton(rng, 3);
    // Make one mode unstable half the time so reconstruction gets exercised.
    if (trial % 2 == 0) a.modes[0].flow.vertices[0].matrix = Eigen::MatrixXd::Identity(a.dimension(), a.dimension());
    const auto dense = random_dense(rng, a);
    const std::size_t pairs = relax(a, dense).registry.pairs.size();
    const DecompositionResult r = integrated_prove(a, dense);
    EXPECT_LE(r.reconstructions, pairs) << trial;
    if (r.verdict == Verdict::kStable) {
      EXPECT_EQ(check_certificate_sampling(r.certificate->certified, r.certificate->certificate).status,
                SamplingStatus::kPass)
          << trial;
    }
  }
}

}  // namespace
}  // namespace lyapdecomp
