#pragma once

#include <Eigen/Dense>

#include "lyapdecomp/automaton.hpp"

namespace lyapdecomp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  double value = 0.0;
};

/// minimize c·x subject to A x <= b, x free. Dense two-phase simplex with
/// Bland's rule; intended for the handful of rows found in guards and
/// invariants.
LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Exact-up-to-tolerance emptiness test by a phase-one solve.
bool is_empty(const Polyhedron& p);

/// Some point of p, if nonempty.
std::optional<Eigen::VectorXd> feasible_point(const Polyhedron& p);

struct BoundingBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  /// Per coordinate: whether the LP found a finite bound.
  Eigen::Array<bool, Eigen::Dynamic, 1> lower_finite;
  Eigen::Array<bool, Eigen::Dynamic, 1> upper_finite;
};

/// Axis-aligned bounds of a nonempty polyhedron. Infinite sides are reported
/// through the *_finite flags with the bound set to +-infinity.
BoundingBox bounding_box(const Polyhedron& p);

}  // namespace lyapdecomp
