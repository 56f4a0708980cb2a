#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lyapdecomp {

class Digraph;

/// Ordered, named continuous variables. The state space is R^dimension().
struct VariableSet {
  std::vector<std::string> names;

  std::size_t dimension() const { return names.size(); }
  std::optional<std::size_t> index_of(const std::string& name) const;

  bool operator==(const VariableSet&) const = default;
};

/// One closed half-space a·x <= b.
struct HalfSpace {
  Eigen::VectorXd a;
  double b = 0.0;
};

bool operator==(const HalfSpace& lhs, const HalfSpace& rhs);

/// Intersection of closed half-spaces. No rows means all of R^n; the empty
/// set is written as the single row 0·x <= -1.
struct Polyhedron {
  std::size_t dimension = 0;
  std::vector<HalfSpace> rows;

  static Polyhedron universe(std::size_t n);
  static Polyhedron empty_set(std::size_t n);
  /// lower <= x <= upper, componentwise.
  static Polyhedron box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

  void add_row(Eigen::VectorXd a, double b) { rows.push_back({std::move(a), b}); }
  Polyhedron intersect(const Polyhedron& other) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  /// True when some row reads 0·x <= b with b < 0 (no LP needed).
  bool trivially_empty() const;

  bool operator==(const Polyhedron&) const = default;
};

/// x -> matrix·x + offset
struct AffineMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd offset;

  static AffineMap identity(std::size_t n);
  static AffineMap zero(std::size_t n);

  std::size_t dimension() const { return static_cast<std::size_t>(offset.size()); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x + offset; }
  bool is_identity() const;

  bool operator==(const AffineMap& other) const;
};

/// Polytopic differential inclusion xdot in conv{A_i x + b_i}.
struct AffineDynamics {
  std::vector<AffineMap> vertices;

  /// xdot = 0, used for the central mode of a relaxed automaton.
  static AffineDynamics zero(std::size_t n);

  bool operator==(const AffineDynamics&) const = default;
};

struct Mode {
  std::string id;
  AffineDynamics flow;
  Polyhedron invariant;
  /// Variables the local Lyapunov function of this mode is measured on.
  std::vector<std::string> converging_vars;

  bool operator==(const Mode&) const = default;
};

struct Transition {
  std::string id;
  std::string source;
  std::string target;
  Polyhedron guard;
  AffineMap update;

  bool is_self_loop() const { return source == target; }
  bool operator==(const Transition&) const = default;
};

struct HybridAutomaton {
  VariableSet variables;
  std::vector<Mode> modes;
  std::vector<Transition> transitions;
  /// Variables required to converge to the equilibrium.
  std::vector<std::string> convergence_set;

  std::size_t dimension() const { return variables.dimension(); }
  const Mode* find_mode(const std::string& id) const;
  Mode* find_mode(const std::string& id);
  const Transition* find_transition(const std::string& id) const;

  bool operator==(const HybridAutomaton&) const = default;
};

/// Every violated structural invariant, each naming the offending element.
/// An empty result means the automaton is well formed.
std::vector<std::string> validate_automaton(const HybridAutomaton& a);

/// Rewrites the automaton in coordinates y = x - point.
/// Throws std::invalid_argument on a dimension mismatch.
HybridAutomaton shift_equilibrium(const HybridAutomaton& a, const Eigen::VectorXd& point);

/// Modes and transitions sorted by id, polyhedron rows sorted
/// lexicographically, converging variables listed in variable order.
HybridAutomaton canonicalize(const HybridAutomaton& a);

/// Field-by-field comparison of two canonicalized automata with an absolute
/// tolerance on every number.
bool approx_equal(const HybridAutomaton& lhs, const HybridAutomaton& rhs, double tol = 1e-9);

/// Vertices are mode ids; one edge per ordered pair of modes joined by at
/// least one transition. Self-loops stay as self-edges.
Digraph underlying_digraph(const HybridAutomaton& a);

}  // namespace lyapdecomp
