#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/decomposer.hpp"

namespace lyapdecomp {

/// One original transition rerouted through the central mode: `first`
/// moves to the central mode without changing the state, `second` applies
/// the original update. Both keep the original guard.
struct SplitTransitionPair {
  Transition first;
  Transition second;
  std::string origin;
};

/// Pairs are kept sorted by origin id.
struct SplitRegistry {
  std::string central_mode;
  std::vector<SplitTransitionPair> pairs;

  const SplitTransitionPair* find(const std::string& origin) const;
};

struct RelaxResult {
  HybridAutomaton automaton;
  SplitRegistry registry;
};

/// `m_c`, or `m_c#k` for the smallest k that is not a mode id of `a`.
std::string central_mode_id(const HybridAutomaton& a);
std::string first_part_id(const std::string& origin);
std::string second_part_id(const std::string& origin);

/// Reroutes every transition with an endpoint in `dense` through a fresh
/// central mode with zero flow and empty invariant. Throws
/// std::invalid_argument for an empty or unknown dense set.
RelaxResult relax(const HybridAutomaton& a, const std::set<std::string>& dense);

/// Replaces the pair of `origin` by the original transition; the central
/// mode goes away with the last pair. Throws std::invalid_argument when
/// `origin` is not registered or its parts are missing.
RelaxResult reconstruct(const HybridAutomaton& a, const SplitRegistry& reg,
                        const std::string& origin);

/// Relax, then decompose; on failure reconstruct the pair with the smallest
/// origin id that meets the failed subgraph and try again. Once no pair is
/// left the original automaton is decomposed. At most |pairs| rounds.
DecompositionResult integrated_prove(const HybridAutomaton& a, const std::set<std::string>& dense,
                                     LyapunovBackend* backend, const DecomposeOptions& opts = {});
DecompositionResult integrated_prove(const HybridAutomaton& a, const std::set<std::string>& dense,
                                     const DecomposeOptions& opts = {});

/// Appends a variable that no template measures. The first part of pair i
/// (1-based, registry order) sets it to i; the second part of pair i
/// additionally requires it to equal i. Throws std::invalid_argument for an
/// empty registry.
HybridAutomaton tag_split_transitions(const HybridAutomaton& a, const SplitRegistry& reg);

/// Ordered (first part, second part) combinations through the central mode
/// that a run can take: the first guard meets the preimage of the second
/// guard. Spurious ones join parts of different origins.
struct CompositionCount {
  std::size_t composable = 0;
  std::size_t spurious = 0;
};

CompositionCount count_compositions(const HybridAutomaton& relaxed, const SplitRegistry& reg);

/// "all", "none", "auto" (densest peel at `threshold`, empty when nothing
/// qualifies) or a comma-separated list of mode ids. Throws
/// std::invalid_argument for unknown ids.
std::set<std::string> resolve_dense(const HybridAutomaton& a, const std::string& choice,
                                    double threshold = kDefaultDensityThreshold);

}  // namespace lyapdecomp
