#pragma once

#include <cstddef>
#include <string>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/digraph.hpp"

namespace lyapdecomp {

/// Modes m1..mn with xdot = -x on [-10, 10]; transition t_i_j for every
/// ordered pair, full-box guard, identity update. Throws
/// std::invalid_argument unless 1 <= n <= 8.
HybridAutomaton generate_kn_fixture(std::size_t n);

/// Planar positioning controller on |x|, |y| <= 50: a proportional center
/// square |x|, |y| <= 3, four axis strips and four quadrants. Neighboring
/// sectors and center/outer sectors are joined both ways, guarded by the
/// common boundary, with identity updates.
HybridAutomaton generate_spidercam_fixture();

/// Strongly connected skeleton with 6 vertices and 11 edges.
Digraph generate_acc_skeleton();

/// A placeholder automaton on `g`: one stable 1-D mode per vertex and one
/// transition `<u>_to_<v>` per edge, full-box guards, identity updates.
HybridAutomaton automaton_from_digraph(const Digraph& g);

/// Three 1-D modes S, H, L with xdot = -x on [-10, 10]. S jumps to H on
/// [1, 2] doubling x; H jumps to L on [1, 3]; L loops on [1, 2]. Stable,
/// yet with all three modes relaxed the central function would have to lie
/// below V_H and above V_H(2x) on the shared guard range.
HybridAutomaton generate_overlap_fixture();

/// One mode xdot = a x on all of R.
HybridAutomaton generate_scalar_fixture(double a);

/// xdot = [[-1, 1], [-1, -1]] x on all of R^2.
HybridAutomaton generate_rotation_fixture();

/// "k<n>", "spidercam", "acc", "overlap", "unstable", "stable1d", "rotation".
/// Throws std::invalid_argument for other names.
HybridAutomaton fixture_by_name(const std::string& name);

}  // namespace lyapdecomp
