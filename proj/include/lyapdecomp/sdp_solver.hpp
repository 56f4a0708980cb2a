#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lyapdecomp/kernels.hpp"
#include "lyapdecomp/lmi.hpp"

namespace lyapdecomp {

enum class SolverMethod {
  /// Primal-dual path following on the largest common margin of all blocks.
  kInteriorPoint,
  /// Dykstra-corrected alternating projections.
  kAlternatingProjections,
};

struct SolverOptions {
  SolverMethod method = SolverMethod::kInteriorPoint;
  int ipm_iterations = 150;
  int max_iterations = 20000;
  /// Dykstra stopping tolerance on the scaled cone/affine distance.
  double tolerance = 1e-7;
  /// Interior point: a proven margin bound below minus this means
  /// infeasible. Projections: best violation above this at the cap, with a
  /// growing correction, means infeasible.
  double infeasible_violation = 1e-7;
  /// Accepted points satisfy every strengthened LMI with minimum eigenvalue
  /// at least -accept_eig.
  double accept_eig = 1e-9;
  int check_every = 10;
  ExecPolicy policy = ExecPolicy::kSerial;
};

enum class SolveStatus { kFeasible, kInfeasible, kInconclusive };

const char* to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kInconclusive;
  /// Present for kFeasible; covers every declared unknown.
  Assignment assignment;
  /// Smallest scaled violation seen.
  double violation = 0.0;
  int iterations = 0;
  std::string message;
};

/// Interior point: maximizes the common margin t in F_j(y) >= t I and
/// y_u >= t, stopping at the first iterate that is accepted outright or
/// after snapping its nearly singular directions to exact singularity.
/// Projections: alternates between the affine set {(y, S): S_j = F_j(y)}
/// and the cone of PSD blocks with sign-constrained unknowns.
/// The point found is scaled down to the smallest multiple that is still
/// accepted. A feasible result always passes the acceptance check. Deterministic: the
/// seed only moves the projection method's starting point.
SolveResult solve_feasibility(const SDPProblem& p, std::uint64_t seed = 0,
                              const SolverOptions& opts = {});

/// Alternating projections started from `target` (one value per declared
/// unknown, in declaration order), so the result approximates the feasible
/// point nearest to the target.
SolveResult solve_projection(const SDPProblem& p, const Eigen::VectorXd& target,
                             const SolverOptions& opts = {});

/// A feasible point that maximizes dir'y within a large box, by the
/// interior point method with the margin held at zero.
SolveResult solve_directional(const SDPProblem& p, const Eigen::VectorXd& dir,
                              const SolverOptions& opts = {});

/// Minimum eigenvalue of every strengthened LMI at `values`; the check the
/// solver applies before reporting feasibility.
bool accepts(const SDPProblem& p, const Assignment& values, double tol, std::string* why = nullptr);

/// Finitely many feasible points standing in for the feasible set.
struct CandidateSet {
  std::vector<Assignment> candidates;
};

class InfeasibleProblem : public std::runtime_error {
 public:
  InfeasibleProblem(SolveStatus status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

/// Candidate 0 is the plain feasibility solution; 1 and 2 lean towards
/// decreasing and increasing total trace; the rest lean along seeded random
/// directions (directional solves, or projections of pushed points). Each is
/// scaled like the plain solution, then near-duplicates (relative distance
/// < 1e-6) are dropped. Throws InfeasibleProblem when the feasibility solve fails.
CandidateSet extract_candidate_llfs(const SDPProblem& p, std::size_t k, std::uint64_t seed,
                                    const SolverOptions& opts = {});

/// Values of `a` in declaration order of `p`; missing entries are zero.
Eigen::VectorXd to_vector(const SDPProblem& p, const Assignment& a);
Assignment to_assignment(const SDPProblem& p, const Eigen::VectorXd& v);

}  // namespace lyapdecomp
