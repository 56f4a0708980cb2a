#include <gtest/gtest.h>

#include "../src/interior_point.hpp"
#include "lyapdecomp/certifier.hpp"
#include "lyapdecomp/constraints.hpp"
#include "lyapdecomp/fixtures.hpp"
#include "lyapdecomp/sdp_solver.hpp"
#include "support.hpp"

namespace lyapdecomp {
namespace {

using testing::Rng;

SDPProblem mode_problem(const HybridAutomaton& a) {
  Fragment f;
  f.dimension = a.dimension();
  for (const auto& m : a.modes) {
    f.templates.emplace(m.id, QuadraticTemplate::fresh(m.id, a.dimension(), active_indices(a, m)));
    f.modes.push_back({m, m.id});
  }
  for (const auto& t : a.transitions) f.jumps.push_back({t, t.source, t.target});
  return assemble_sdp(f, {});
}

SolverOptions with(SolverMethod method) {
  SolverOptions o;
  o.method = method;
  return o;
}

class BothMethods : public ::testing::TestWithParam<SolverMethod> {};

TEST_P(BothMethods, StableScalarIsFeasible) {
  const SDPProblem p = mode_problem(generate_scalar_fixture(-1.0));
  const SolveResult r = solve_feasibility(p, 0, with(GetParam()));
  ASSERT_EQ(r.status, SolveStatus::kFeasible) << r.message;
  EXPECT_GT(r.assignment.at(p_entry_id("m1", 0, 0)), 0.0);
  EXPECT_TRUE(accepts(p, r.assignment, 1e-9));
}

TEST_P(BothMethods, UnstableScalarIsInfeasible) {
  const SolveResult r = solve_feasibility(mode_problem(generate_scalar_fixture(1.0)), 0, with(GetParam()));
  EXPECT_EQ(r.status, SolveStatus::kInfeasible) << r.message;
  EXPECT_TRUE(r.assignment.empty());
}

TEST_P(BothMethods, RotationIsFeasibleAndPositive) {
  const SDPProblem p = mode_problem(generate_rotation_fixture());
  const SolveResult r = solve_feasibility(p, 0, with(GetParam()));
  ASSERT_EQ(r.status, SolveStatus::kFeasible) << r.message;
  const QuadraticTemplate t = QuadraticTemplate::fresh("m1", 2, {0, 1});
  const Eigen::MatrixXd P = t.evaluate(r.assignment).topLeftCorner(2, 2);
  EXPECT_GE(min_eigenvalue(P), 1e-3 - 1e-8);
}

TEST_P(BothMethods, DeterministicPerSeed) {
  const SDPProblem p = mode_problem(generate_kn_fixture(2));
  const SolveResult a = solve_feasibility(p, 3, with(GetParam()));
  const SolveResult b = solve_feasibility(p, 3, with(GetParam()));
  ASSERT_EQ(a.status, SolveStatus::kFeasible);
  EXPECT_EQ(a.assignment, b.assignment);
}

INSTANTIATE_TEST_SUITE_P(Solver, BothMethods,
                         ::testing::Values(SolverMethod::kInteriorPoint, SolverMethod::kAlternatingProjections));

// Random Hurwitz matrices A = -(B B^T + 0.1 I) + (S - S^T) are stable, and a
// feasible assignment must pass the exact check at tol_eig (the hand-off).
TEST(SolverProperty, FeasibleResultsPassTheExactCheck) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    HybridAutomaton a = generate_rotation_fixture();
    Eigen::Matrix2d b, s;
    for (int i = 0; i < 4; ++i) {
      b(i / 2, i % 2) = testing::uniform(rng, -2, 2);
      s(i / 2, i % 2) = testing::uniform(rng, -2, 2);
    }
    a.modes[0].flow.vertices[0].matrix = -(b * b.transpose() + 0.1 * Eigen::Matrix2d::Identity()) + (s - s.transpose());
    const SDPProblem p = mode_problem(a);
    const SolveResult r = solve_feasibility(p, static_cast<std::uint64_t>(trial));
    ASSERT_EQ(r.status, SolveStatus::kFeasible) << "trial " << trial << ": " << r.message;
    QuadraticCertificate cert;
    cert.values = r.assignment;
    const auto check = check_certificate_exact(p, cert, kDefaultTolEig);
    EXPECT_TRUE(check.pass) << check.details;
  }
}

TEST(SolverProperty, UnstableDiagonalModesAreNeverFeasible) {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    HybridAutomaton a = generate_rotation_fixture();
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    A(0, 0) = testing::uniform(rng, 0.1, 2.0);
    A(1, 1) = testing::uniform(rng, -2.0, 2.0);
    a.modes[0].flow.vertices[0].matrix = A;
    EXPECT_NE(solve_feasibility(mode_problem(a)).status, SolveStatus::kFeasible) << trial;
  }
}

TEST(Candidates, SingleCandidateIsThePlainSolution) {
  const SDPProblem p = mode_problem(generate_scalar_fixture(-1.0));
  const CandidateSet cs = extract_candidate_llfs(p, 1, 0);
  ASSERT_EQ(cs.candidates.size(), 1U);
  const SolveResult plain = solve_feasibility(p, 0);
  EXPECT_EQ(cs.candidates[0], plain.assignment);
  EXPECT_TRUE(accepts(p, cs.candidates[0], 1e-9));
}

TEST(Candidates, OneDimensionalCandidatesAreDistinctAndInRange) {
  const SDPProblem p = mode_problem(generate_scalar_fixture(-1.0));
  const CandidateSet cs = extract_candidate_llfs(p, 3, 0);
  ASSERT_GE(cs.candidates.size(), 2U);
  std::set<double> values;
  for (const auto& c : cs.candidates) {
    const double v = c.at(p_entry_id("m1", 0, 0));
    // Strengthened LMIs: p >= eps_dec / 2 + gap / 2 and p <= m_up - gap.
    EXPECT_GE(v, (1e-3 + 1e-4) / 2 - 1e-9);
    EXPECT_LE(v, 1e6);
    values.insert(v);
  }
  EXPECT_EQ(values.size(), cs.candidates.size());
}

TEST(Candidates, InfeasibleInputThrows) {
  EXPECT_THROW(extract_candidate_llfs(mode_problem(generate_scalar_fixture(1.0)), 3, 0), InfeasibleProblem);
}

TEST(CandidatesProperty, ConicalCombinationsStayFeasible) {
  const SDPProblem p = mode_problem(generate_kn_fixture(2));
  const CandidateSet cs = extract_candidate_llfs(p, 4, 7);
  ASSERT_GE(cs.candidates.size(), 2U);
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(cs.candidates.size());
    double sum = 0.0;
    for (auto& x : c) sum += (x = testing::uniform(rng, 0, 1));
    const double scale = testing::uniform(rng, 1.0, 3.0) / sum;
    Assignment mix;
    for (std::size_t k = 0; k < c.size(); ++k) {
      for (const auto& [id, v] : cs.candidates[k]) mix[id] += scale * c[k] * v;
    }
    QuadraticCertificate cert;
    cert.values = mix;
    EXPECT_TRUE(check_certificate_exact(p, cert, kDefaultTolEig).pass) << trial;
  }
}

TEST(InteriorPoint, TwoByTwoCorrelationBound) {
  // max y  s.t.  [[1, y], [y, 1]] >= 0 has optimum y = 1.
  detail::DualSdp sdp;
  sdp.unknowns = 1;
  detail::DualBlock blk;
  blk.c = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d a;
  a << 0, -1, -1, 0;
  blk.a.push_back({0, a});
  sdp.blocks.push_back(blk);
  sdp.b = Eigen::VectorXd::Ones(1);
  const auto r = detail::solve_dual_sdp(sdp, Eigen::VectorXd::Zero(1), 100, ExecPolicy::kSerial, {});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.y(0), 1.0, 1e-6);
  EXPECT_NEAR(r.primal_objective, r.dual_objective, 1e-7);
}

TEST(InteriorPoint, SerialAndParallelAgree) {
  // max sum(y) s.t. diag(1 - y_i) >= 0 and a coupling block.
  Rng rng(44);
  detail::DualSdp sdp;
  sdp.unknowns = 4;
  for (int k = 0; k < 6; ++k) {
    detail::DualBlock blk;
    blk.c = 5.0 * Eigen::Matrix3d::Identity();
    for (Eigen::Index i = 0; i < 4; ++i) {
      Eigen::Matrix3d m = Eigen::Matrix3d::Random();
      blk.a.push_back({i, 0.5 * (m + m.transpose())});
    }
    sdp.blocks.push_back(blk);
  }
  sdp.b = Eigen::VectorXd::Ones(4);
  const auto s = detail::solve_dual_sdp(sdp, Eigen::VectorXd::Zero(4), 100, ExecPolicy::kSerial, {});
  const auto p = detail::solve_dual_sdp(sdp, Eigen::VectorXd::Zero(4), 100, ExecPolicy::kParallel, {});
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.y, p.y);
  EXPECT_EQ(s.iterations, p.iterations);
  for (const auto& blk : sdp.blocks) {
    Eigen::MatrixXd slack = blk.c;
    for (const auto& [i, a] : blk.a) slack -= s.y(i) * a;
    EXPECT_GE(min_eigenvalue(slack), -1e-9);
  }
}

TEST(InteriorPoint, StopCallbackEndsTheRun) {
  detail::DualSdp sdp;
  sdp.unknowns = 1;
  detail::DualBlock blk;
  blk.c = Eigen::MatrixXd::Ones(1, 1);
  blk.a.push_back({0, Eigen::MatrixXd::Ones(1, 1)});
  sdp.blocks.push_back(blk);
  sdp.b = Eigen::VectorXd::Ones(1);
  const auto r = detail::solve_dual_sdp(sdp, Eigen::VectorXd::Zero(1), 100, ExecPolicy::kSerial,
                                        [](const Eigen::VectorXd& y) { return y(0) > 0.5; });
  EXPECT_TRUE(r.stopped);
  EXPECT_GT(r.y(0), 0.5);
  EXPECT_LT(r.y(0), 1.0);
}

TEST(Projection, StartsFromTheTarget) {
  const SDPProblem p = mode_problem(generate_scalar_fixture(-1.0));
  const SolveResult r = solve_projection(p, Eigen::VectorXd::Constant(1, 42.0));
  ASSERT_EQ(r.status, SolveStatus::kFeasible);
  EXPECT_NEAR(r.assignment.at(p_entry_id("m1", 0, 0)), 42.0, 1e-6);
}

TEST(Directional, MaximizesTheDirection) {
  const SDPProblem p = mode_problem(generate_scalar_fixture(-1.0));
  const SolveResult up = solve_directional(p, Eigen::VectorXd::Ones(1));
  const SolveResult down = solve_directional(p, -Eigen::VectorXd::Ones(1));
  ASSERT_EQ(up.status, SolveStatus::kFeasible);
  ASSERT_EQ(down.status, SolveStatus::kFeasible);
  EXPECT_GT(up.assignment.at(p_entry_id("m1", 0, 0)), down.assignment.at(p_entry_id("m1", 0, 0)));
}

}  // namespace
}  // namespace lyapdecomp
