#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lyapdecomp/kernels.hpp"

namespace lyapdecomp::detail {

// One block of S(y) = c - sum_i y_i a_i.
struct DualBlock {
  Eigen::MatrixXd c;
  std::vector<std::pair<Eigen::Index, Eigen::MatrixXd>> a;
};

// max b'y  s.t.  S_k(y) >= 0 for every block, with the primal
// min <C, X>  s.t.  A(X) = b, X >= 0.
struct DualSdp {
  Eigen::Index unknowns = 0;
  std::vector<DualBlock> blocks;
  Eigen::VectorXd b;
};

struct IpmResult {
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  int iterations = 0;
  bool stopped = false;
  bool converged = false;
};

// Mehrotra predictor-corrector with the HKM direction from the strictly
// feasible dual point y0 and X = xi I. Every dual iterate is strictly
// feasible: S is recomputed from y and the dual step shortened until each
// block factors. `stop` sees each dual iterate and ends the run by
// returning true.
IpmResult solve_dual_sdp(const DualSdp& sdp, const Eigen::VectorXd& y0, int max_iterations,
                         ExecPolicy policy,
                         const std::function<bool(const Eigen::VectorXd&)>& stop);

}  // namespace lyapdecomp::detail
