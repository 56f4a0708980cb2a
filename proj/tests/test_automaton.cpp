#include <gtest/gtest.h>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/digraph.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/model_io.hpp"
#include "support.hpp"

namespace lyapdecomp {
namespace {

using testing::Rng;

HybridAutomaton two_mode_automaton() {
  HybridAutomaton a;
  a.variables.names = {"x", "y"};
  a.convergence_set = {"x"};
  for (const char* id : {"m1", "m2"}) {
    Mode m;
    m.id = id;
    m.flow.vertices.push_back({-Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)});
    m.invariant = Polyhedron::universe(2);
    m.converging_vars = {"x", "y"};
    a.modes.push_back(m);
  }
  Transition t;
  t.id = "t";
  t.source = "m1";
  t.target = "m2";
  t.guard = Polyhedron::universe(2);
  t.update = AffineMap::identity(2);
  a.transitions.push_back(t);
  return a;
}

std::vector<std::string> all_fixture_names() {
  return {"k1", "k2", "k3", "k4", "k5", "spidercam", "acc", "overlap", "unstable", "stable1d", "rotation"};
}

TEST(Validate, WellFormedHasNoViolations) { EXPECT_TRUE(validate_automaton(two_mode_automaton()).empty()); }

TEST(Validate, UnknownTargetIsNamed) {
  HybridAutomaton a = two_mode_automaton();
  a.transitions[0].target = "z";
  const auto v = validate_automaton(a);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_NE(v[0].find("\"z\""), std::string::npos) << v[0];
}

TEST(Validate, FlowDimensionMismatch) {
  HybridAutomaton a = two_mode_automaton();
  a.modes[0].flow.vertices[0] = {-Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)};
  const auto v = validate_automaton(a);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_NE(v[0].find("m1"), std::string::npos) << v[0];
}

TEST(Validate, ConvergingVarsMustCoverConvergenceSet) {
  HybridAutomaton a = two_mode_automaton();
  a.modes[1].converging_vars = {"y"};
  EXPECT_EQ(validate_automaton(a).size(), 1U);
}

TEST(Validate, EmptyConvergenceSetAndDuplicateIds) {
  HybridAutomaton a = two_mode_automaton();
  a.convergence_set.clear();
  a.modes[1].id = "m1";
  a.transitions[0].target = "m1";
  EXPECT_GE(validate_automaton(a).size(), 2U);
}

TEST(Validate, EveryFixtureIsWellFormed) {
  for (const auto& name : all_fixture_names()) {
    EXPECT_TRUE(validate_automaton(fixture_by_name(name)).empty()) << name;
  }
}

TEST(Polyhedron, EmptySetIsRepresentable) {
  const Polyhedron e = Polyhedron::empty_set(2);
  EXPECT_TRUE(e.trivially_empty());
  EXPECT_FALSE(e.contains(Eigen::VectorXd::Zero(2)));
  EXPECT_TRUE(Polyhedron::universe(2).contains(Eigen::VectorXd::Constant(2, 1e9)));
}

TEST(Shift, ByZeroIsIdentity) {
  const HybridAutomaton a = generate_spidercam_fixture();
  EXPECT_EQ(shift_equilibrium(a, Eigen::VectorXd::Zero(2)), a);
}

TEST(Shift, FlowAndGuardOffsets) {
  HybridAutomaton a = generate_scalar_fixture(-1.0);
  a.modes[0].flow.vertices[0].offset(0) = 5.0;  // xdot = -(x - 5)
  Transition t;
  t.id = "t";
  t.source = t.target = "m1";
  t.guard = Polyhedron::universe(1);
  t.guard.add_row(Eigen::VectorXd::Ones(1), 7.0);
  t.update = AffineMap::identity(1);
  a.transitions.push_back(t);
  const HybridAutomaton s = shift_equilibrium(a, Eigen::VectorXd::Constant(1, 5.0));
  EXPECT_DOUBLE_EQ(s.modes[0].flow.vertices[0].matrix(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(s.modes[0].flow.vertices[0].offset(0), 0.0);
  EXPECT_DOUBLE_EQ(s.transitions[0].guard.rows[0].b, 2.0);
  EXPECT_DOUBLE_EQ(s.transitions[0].update.offset(0), 0.0);
}

TEST(Shift, DimensionMismatchThrows) {
  EXPECT_THROW(shift_equilibrium(generate_scalar_fixture(-1.0), Eigen::VectorXd::Zero(2)),
               std::invalid_argument);
}

TEST(ShiftProperty, ShiftBackRestoresRandomAutomata) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 5);
    Eigen::VectorXd p(static_cast<Eigen::Index>(a.dimension()));
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = testing::uniform(rng, -4, 4);
    const HybridAutomaton back = shift_equilibrium(shift_equilibrium(a, p), -p);
    EXPECT_TRUE(approx_equal(canonicalize(back), canonicalize(a), 1e-9)) << "trial " << trial;
  }
}

TEST(ShiftProperty, UpdatesCommuteWithTheShift) {
  // U'(y) = U(y + p) - p must map shifted points like U maps original ones.
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 3);
    if (a.transitions.empty()) continue;
    const auto n = static_cast<Eigen::Index>(a.dimension());
    const Eigen::VectorXd p = Eigen::VectorXd::Random(n) * 3.0;
    const HybridAutomaton s = shift_equilibrium(a, p);
    const Eigen::VectorXd x = Eigen::VectorXd::Random(n) * 5.0;
    const AffineMap& u = a.transitions[0].update;
    const AffineMap& v = s.transitions[0].update;
    EXPECT_TRUE((v.apply(x - p) - (u.apply(x) - p)).norm() < 1e-12);
    EXPECT_EQ(a.transitions[0].guard.contains(x), s.transitions[0].guard.contains(x - p));
  }
}

TEST(UnderlyingDigraph, DirectedK3) {
  const Digraph g = underlying_digraph(generate_kn_fixture(3));
  EXPECT_EQ(g.vertex_count(), 3U);
  EXPECT_EQ(g.edge_count(), 6U);
  EXPECT_EQ(g.self_loop_count(), 0U);
}

TEST(UnderlyingDigraph, ParallelTransitionsGiveOneEdge) {
  HybridAutomaton a = two_mode_automaton();
  a.transitions.push_back(a.transitions[0]);
  a.transitions[1].id = "t2";
  const Digraph g = underlying_digraph(a);
  EXPECT_EQ(g.edge_count(), 1U);
  EXPECT_TRUE(g.has_edge("m1", "m2"));
}

TEST(UnderlyingDigraph, SelfLoopsOnly) {
  HybridAutomaton a = two_mode_automaton();
  a.transitions[0].target = "m1";
  a.transitions.push_back(a.transitions[0]);
  a.transitions[1].id = "t2";
  a.transitions[1].source = a.transitions[1].target = "m2";
  const Digraph g = underlying_digraph(a);
  EXPECT_EQ(g.vertex_count(), 2U);
  EXPECT_EQ(g.edge_count(), 2U);
  EXPECT_EQ(g.self_loop_count(), 2U);
}

TEST(UnderlyingDigraphProperty, CountsBoundedByAutomaton) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 6);
    const Digraph g = underlying_digraph(a);
    EXPECT_EQ(g.vertex_count(), a.modes.size());
    EXPECT_LE(g.edge_count(), a.transitions.size());
  }
}

TEST(ModelIo, RoundTripIsCanonicalForFixtures) {
  for (const auto& name : all_fixture_names()) {
    const HybridAutomaton a = fixture_by_name(name);
    const std::string text = serialize_model(a);
    const HybridAutomaton back = parse_model(text);
    EXPECT_EQ(back, canonicalize(a)) << name;
    EXPECT_EQ(serialize_model(back), text) << name;
  }
}

TEST(ModelIoProperty, RoundTripOnRandomAutomata) {
  Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const HybridAutomaton a = testing::random_automaton(rng, 6);
    EXPECT_TRUE(approx_equal(parse_model(serialize_model(a)), canonicalize(a), 0.0)) << trial;
  }
}

TEST(ModelIo, SpidercamCounts) {
  const HybridAutomaton a = parse_model(serialize_model(generate_spidercam_fixture()));
  EXPECT_EQ(a.modes.size(), 9U);
  EXPECT_EQ(a.transitions.size(), 32U);
}

TEST(ModelIo, MissingConvergenceSetIsSemanticError) {
  const std::string text = R"({"variables": ["x"], "modes": [], "transitions": []})";
  try {
    parse_model(text);
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.kind(), ModelError::Kind::kSemantic);
    EXPECT_NE(std::string(e.what()).find("convergence_set"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, SyntaxErrorCarriesPosition) {
  try {
    parse_model("{\n  \"variables\": [\"x\",\n}");
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.kind(), ModelError::Kind::kSyntax);
    EXPECT_EQ(e.line(), 3U);
    EXPECT_GT(e.column(), 0U);
  }
}

TEST(ModelIo, UnknownKeyIsAnError) {
  std::string text = serialize_model(generate_scalar_fixture(-1.0));
  text.insert(1, "\"colour\": 1,");
  EXPECT_THROW(parse_model(text), ModelError);
}

TEST(ModelIo, IllFormedModelReportsViolations) {
  HybridAutomaton a = two_mode_automaton();
  a.transitions[0].target = "z";
  try {
    parse_model(serialize_model(a));
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.kind(), ModelError::Kind::kSemantic);
    EXPECT_EQ(e.violations().size(), 1U);
  }
}

TEST(ModelIo, ConvergingVarsDefaultToAllVariables) {
  const std::string text = R"({"variables": ["x", "y"], "convergence_set": ["x"],
    "modes": [{"id": "m", "flow": {"vertices": [{"matrix": [[-1, 0], [0, -1]], "offset": [0, 0]}]},
               "invariant": {"rows": [{"a": [1, 0], "b": 2.5e0}]}}],
    "transitions": []})";
  const HybridAutomaton a = parse_model(text);
  EXPECT_EQ(a.modes[0].converging_vars, (std::vector<std::string>{"x", "y"}));
  EXPECT_DOUBLE_EQ(a.modes[0].invariant.rows[0].b, 2.5);
}

}  // namespace
}  // namespace lyapdecomp
