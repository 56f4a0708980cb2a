#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/certifier.hpp"
#include "lyapdecomp/constraints.hpp"
#include "lyapdecomp/digraph.hpp"
#include "lyapdecomp/sdp_solver.hpp"

namespace lyapdecomp {

/// Condition (3) of one transition between two templates.
struct EdgeConstraint {
  std::string transition;
  std::string src_tpl;
  std::string dst_tpl;

  bool operator==(const EdgeConstraint&) const = default;
};

/// Constraints of a collapsed cycle, kept in terms of templates so they can
/// be regenerated over fresh unknowns or copied under renaming.
struct Obligations {
  /// (original mode id, template id): bound and decrease conditions.
  std::vector<std::pair<std::string, std::string>> modes;
  std::vector<EdgeConstraint> jumps;
  /// (region id, number of candidates): sum of coefficients >= 1.
  std::vector<std::pair<std::string, std::size_t>> conics;

  void append(const Obligations& other);
};

/// A collapsed cycle. Its candidates assign every unknown it houses (entries
/// of housed templates, multipliers of its obligations, coefficients of
/// nested regions); conical combinations of them satisfy the obligations.
struct Region {
  std::string id;
  std::vector<std::string> templates;
  std::vector<std::string> nested;
  std::vector<Assignment> candidates;
  /// Number of candidates; equals candidates.size() unless counting only.
  std::size_t candidate_count = 0;
  Obligations obligations;
  std::set<std::string> modes;
  std::set<std::string> transitions;
};

struct VertexPayload {
  /// Template id for a mode (or mode copy) vertex; empty for a region.
  std::string tpl;
  /// Region id for a collapsed vertex; empty otherwise.
  std::string region;
  /// Transitions from the vertex back into itself.
  std::vector<EdgeConstraint> self_loops;

  bool is_region() const { return !region.empty(); }
};

struct ConstraintGraph {
  HybridAutomaton automaton;
  std::map<std::string, VertexPayload> vertices;
  /// Keyed by (source vertex, target vertex); never a self-loop.
  std::map<std::pair<std::string, std::string>, std::vector<EdgeConstraint>> edges;
  /// Template id -> original mode id.
  std::map<std::string, std::string> template_mode;
  std::map<std::string, Region> regions;
  /// Every vertex, template and region id ever used.
  std::set<std::string> used_names;
  /// Smallest suffix not yet tried per base name.
  std::map<std::string, std::size_t> next_suffix;
  /// Regions carry no candidates, templates or obligations.
  bool counting = false;

  Digraph digraph() const;
  /// Same as digraph().induced(scope), without building the whole graph.
  Digraph digraph(const std::set<std::string>& scope) const;
  /// Original mode ids housed by a vertex.
  std::set<std::string> provenance(const std::string& vertex) const;
  /// Templates housed by a vertex (one for a mode vertex).
  std::vector<std::string> housed_templates(const std::string& vertex) const;
  /// `base#k` for the smallest k >= 1 not yet used; records it as used.
  std::string fresh_name(const std::string& base);
};

/// One vertex per mode with its self-loops; one edge per ordered pair of
/// distinct modes joined by a transition, carrying one constraint each.
ConstraintGraph build_constraint_graph(const HybridAutomaton& a);

enum class StepKind { kReduction, kModeSplit, kRelax, kReconstruct };

const char* to_string(StepKind k);

struct TraceStep {
  StepKind kind;
  std::vector<std::string> subjects;
  double millis = 0.0;
};

struct DecompositionTrace {
  std::vector<TraceStep> steps;
  std::size_t reductions = 0;
  std::size_t splittings = 0;

  void record(StepKind kind, std::vector<std::string> subjects, double millis);
  void append(const DecompositionTrace& other);
  std::size_t count(StepKind kind) const;
  /// `<index> <kind> <subject-ids> <millis>` per step, then the totals line.
  std::string to_text() const;
};

struct NextStep {
  enum class Kind { kReduce, kSplit, kDone };
  Kind kind = Kind::kDone;
  /// The cycle to reduce; for kDone, the single remaining cycle if any.
  std::optional<Cycle> cycle;
  std::string vertex;
};

/// Done when at most one cycle remains; otherwise the first outer cycle in
/// cycle order; otherwise a split of the vertex on at least two cycles with
/// in-degree x out-degree >= 2 minimal, ties to the smallest id; otherwise
/// (disjoint cycles in separate components) the first cycle. Self-loops
/// are ignored. Works without enumerating cycles; `cycle_limit` caps the
/// path search behind "on at least two cycles" and CycleOverflow is thrown
/// beyond it.
NextStep select_next_step(const Digraph& g, std::size_t cycle_limit = kDefaultCycleLimit);
NextStep select_next_step(const ConstraintGraph& cg, std::size_t cycle_limit = kDefaultCycleLimit);

/// Replaces `v` by one copy per (incoming, outgoing) pair of edges whose
/// other endpoint lies in `scope`. Edges leaving the scope and self-loops are
/// given to every copy. Returns the copy ids. A region is copied with
/// everything it houses renamed.
std::vector<std::string> mode_split(ConstraintGraph* cg, const std::string& v,
                                    const std::set<std::string>& scope);
/// Whole-graph scope.
std::vector<std::string> mode_split(ConstraintGraph* cg, const std::string& v);

/// Solves or counts one fragment of constraints.
class LyapunovBackend {
 public:
  virtual ~LyapunovBackend() = default;
  /// Throws InfeasibleProblem when no candidate exists.
  virtual CandidateSet candidates(const SDPProblem& p, std::size_t k, std::uint64_t seed) = 0;
  virtual SolveResult solve(const SDPProblem& p, std::uint64_t seed) = 0;
};

/// The built-in SDP solver (interior point by default).
class SdpBackend : public LyapunovBackend {
 public:
  explicit SdpBackend(SolverOptions opts = {}) : opts_(opts) {}
  CandidateSet candidates(const SDPProblem& p, std::size_t k, std::uint64_t seed) override;
  SolveResult solve(const SDPProblem& p, std::uint64_t seed) override;

 private:
  SolverOptions opts_;
};

enum class RunMode { kSolve, kCountOnly };

struct DecomposeOptions {
  RunMode mode = RunMode::kSolve;
  std::size_t candidates = 3;
  std::uint64_t seed = 1;
  std::size_t cycle_limit = kDefaultCycleLimit;
  GenerationOptions generation;
  double tol_eig = kDefaultTolEig;
  /// When set, every reduction fragment is written here as
  /// `<region id>.dat-s`.
  std::string export_dir;
};

class ReductionFailure : public std::runtime_error {
 public:
  ReductionFailure(const std::string& what, Cycle cycle, SolveStatus status)
      : std::runtime_error(what), cycle_(std::move(cycle)), status_(status) {}
  const Cycle& cycle() const { return cycle_; }
  SolveStatus status() const { return status_; }

 private:
  Cycle cycle_;
  SolveStatus status_;
};

/// Solves the outer cycle `c` and collapses it into a fresh region that
/// takes the place of its border vertex. In count-only mode (backend null)
/// the region gets one placeholder candidate. Returns the region id.
/// Throws ReductionFailure.
std::string reduce_cycle(ConstraintGraph* cg, const Cycle& c, LyapunovBackend* backend,
                         const DecomposeOptions& opts, SDPProblem* fragment_problem = nullptr);

/// The constraints of the listed vertices and edges as one fragment.
/// Region vertices contribute their conical coefficients; their housed
/// templates become conical combinations of the candidates.
Fragment build_fragment(const ConstraintGraph& cg, const std::vector<std::string>& vertices,
                        const std::vector<std::pair<std::string, std::string>>& edges);

/// The assembled proof: a certificate over the unknowns of `problem` (the
/// conditions of every template, in fresh unknowns) for `certified`, the
/// automaton whose modes are the templates and whose transitions are the
/// jump conditions.
struct AssembledCertificate {
  QuadraticCertificate certificate;
  SDPProblem problem;
  HybridAutomaton certified;
};

struct FailedSubgraph {
  std::set<std::string> modes;
  std::set<std::string> transitions;
  std::string reason;
};

enum class Verdict { kStable, kFailed, kInconclusive };

const char* to_string(Verdict v);

struct DecompositionResult {
  Verdict verdict = Verdict::kFailed;
  std::optional<AssembledCertificate> certificate;
  std::optional<FailedSubgraph> failed_subgraph;
  DecompositionTrace trace;
  std::string diagnostic;
  /// The automaton the final round decomposed.
  HybridAutomaton analyzed;
  std::size_t reconstructions = 0;
};

/// Per-SCC reduction and splitting in condensation order, then a joint solve
/// of what remains. The backend is ignored in count-only mode.
DecompositionResult apply_decomposition(const HybridAutomaton& a, LyapunovBackend* backend,
                                        const DecomposeOptions& opts = {});
DecompositionResult apply_decomposition(const HybridAutomaton& a, const DecomposeOptions& opts = {});

/// Throws std::logic_error on a stable result.
FailedSubgraph failed_subgraph_of(const DecompositionResult& r);

/// Regenerates every condition of the given obligations over fresh template
/// unknowns; templates come from `template_mode`.
SDPProblem obligations_problem(const HybridAutomaton& a,
                               const std::map<std::string, std::string>& template_mode,
                               const Obligations& obligations, const GenerationOptions& opts);

/// Renames the template and region ids embedded in an unknown id.
std::string rename_unknown(const std::string& id, const std::map<std::string, std::string>& names);

}  // namespace lyapdecomp
