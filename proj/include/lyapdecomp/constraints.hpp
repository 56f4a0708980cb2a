#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/lmi.hpp"

namespace lyapdecomp {

/// alpha(s) = eps_pos s^2, beta(s) = m_up s^2, gamma(s) = eps_dec s^2.
struct ClassKParams {
  double eps_pos = 1e-3;
  double m_up = 1e6;
  double eps_dec = 1e-3;
};

struct GenerationOptions {
  ClassKParams class_k;
  /// Margin added to the state block of every mode LMI for the solver.
  double gap = 1e-4;
};

/// Homogenized quadratic V(x) = z^T P z with z = [x; 1]. The affine
/// row/column of P and rows/columns of variables outside `active` are zero.
struct QuadraticTemplate {
  std::string id;
  std::size_t dimension = 0;
  std::vector<std::size_t> active;
  AffineSymMatrix matrix;
  /// Unknowns introduced by this template (fresh entries or conical
  /// coefficients).
  std::vector<Unknown> unknowns;

  /// Entries P[id](i,j), i <= j over active indices.
  static QuadraticTemplate fresh(const std::string& id, std::size_t n,
                                 const std::vector<std::size_t>& active);
  /// sum_k c[region](k) * candidates[k]; the coefficients are declared by
  /// conic_constraint, not here.
  static QuadraticTemplate conical(const std::string& id, std::size_t n,
                                   const std::vector<std::size_t>& active,
                                   const std::string& region,
                                   const std::vector<Eigen::MatrixXd>& candidates);

  /// Diagonal projector onto the active variables in z-coordinates.
  Eigen::MatrixXd projector() const;
  /// P evaluated; (n+1) x (n+1).
  Eigen::MatrixXd evaluate(const Assignment& values) const { return matrix.evaluate(values); }
};

/// Indices of `mode.converging_vars` in the variable order of `a`.
std::vector<std::size_t> active_indices(const HybridAutomaton& a, const Mode& mode);

std::string p_entry_id(const std::string& tpl, std::size_t i, std::size_t j);
std::string conic_coefficient_id(const std::string& region, std::size_t k);
std::string multiplier_id(const std::string& lmi, std::size_t i, std::size_t j);

std::string lower_lmi_name(const std::string& tpl);
std::string upper_lmi_name(const std::string& tpl);
std::string decrease_lmi_name(const std::string& tpl, std::size_t vertex);
std::string jump_lmi_name(const std::string& transition, const std::string& src_tpl,
                          const std::string& dst_tpl);
std::string conic_lmi_name(const std::string& region);

/// [A b; 0 0] for a flow vertex.
Eigen::MatrixXd homogenized_drift(const AffineMap& f);
/// [U u; 0 1] for an update.
Eigen::MatrixXd homogenized_update(const AffineMap& f);

/// An LMI plus the multipliers it introduced.
struct LiftedLmi {
  LinearMatrixInequality lmi;
  std::vector<Unknown> multipliers;
};

/// core - sum lambda_ij sym(r_i r_j^T) ⪰ 0 over products of the domain rows
/// r_i(z) = b_i - a_i·x, i <= j, together with the products r_i * 1.
/// Multipliers are named multiplier_id(name, i, j) with row 0 standing for
/// the constant 1. Returns nothing when the domain is empty.
std::optional<LiftedLmi> s_procedure_lift(const std::string& name, const AffineSymMatrix& core,
                                          const Polyhedron& domain);

/// Bound and decrease conditions of one mode; empty for an empty invariant.
std::vector<LiftedLmi> generate_mode_constraints(const Mode& m, const QuadraticTemplate& t,
                                                 const GenerationOptions& opts);

/// V_dst(U x) <= V_src(x) on the guard; nothing for an empty guard.
std::optional<LiftedLmi> generate_transition_constraint(const Transition& tr,
                                                        const QuadraticTemplate& src,
                                                        const QuadraticTemplate& dst);

/// sum_k c[region](k) - 1 >= 0 as a 1x1 LMI, with the coefficients declared
/// nonnegative.
LiftedLmi conic_constraint(const std::string& region, std::size_t count);

/// A set of modes, transitions and collapsed regions whose constraints are
/// solved together. Templates are keyed by id; modes and transitions refer
/// to them.
struct Fragment {
  struct ModeItem {
    Mode mode;
    std::string tpl;
  };
  struct JumpItem {
    Transition transition;
    std::string src_tpl;
    std::string dst_tpl;
  };
  struct ConicItem {
    std::string region;
    std::size_t count = 0;
  };

  std::size_t dimension = 0;
  std::map<std::string, QuadraticTemplate> templates;
  std::vector<ModeItem> modes;
  std::vector<JumpItem> jumps;
  std::vector<ConicItem> conics;
};

/// Unknowns in template-id order, then conical coefficients, then multipliers
/// in constraint order: mode LMIs, jump LMIs, conic LMIs.
SDPProblem assemble_sdp(const Fragment& f, const GenerationOptions& opts);

}  // namespace lyapdecomp
