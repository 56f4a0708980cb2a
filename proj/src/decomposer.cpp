#include "lyapdecomp/decomposer.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lyapdecomp/sdpa.hpp"

namespace lyapdecomp {

void Obligations::append(const Obligations& other) {
  modes.insert(modes.end(), other.modes.begin(), other.modes.end());
  jumps.insert(jumps.end(), other.jumps.begin(), other.jumps.end());
  conics.insert(conics.end(), other.conics.begin(), other.conics.end());
}

Digraph ConstraintGraph::digraph() const {
  Digraph g;
  for (const auto& [id, payload] : vertices) g.add_vertex(id);
  for (const auto& [id, payload] : vertices) {
    if (!payload.self_loops.empty()) g.add_edge(id, id);
  }
  for (const auto& [key, constraints] : edges) {
    if (!constraints.empty()) g.add_edge(key.first, key.second);
  }
  return g;
}

Digraph ConstraintGraph::digraph(const std::set<std::string>& scope) const {
  Digraph g;
  for (const auto& v : scope) g.add_vertex(v);
  for (const auto& v : scope) {
    if (!vertices.at(v).self_loops.empty()) g.add_edge(v, v);
    for (auto it = edges.lower_bound({v, std::string()}); it != edges.end() && it->first.first == v; ++it) {
      if (!it->second.empty() && scope.count(it->first.second)) g.add_edge(v, it->first.second);
    }
  }
  return g;
}

std::set<std::string> ConstraintGraph::provenance(const std::string& vertex) const {
  const VertexPayload& p = vertices.at(vertex);
  if (p.is_region()) return regions.at(p.region).modes;
  return {template_mode.at(p.tpl)};
}

std::vector<std::string> ConstraintGraph::housed_templates(const std::string& vertex) const {
  const VertexPayload& p = vertices.at(vertex);
  if (p.is_region()) return regions.at(p.region).templates;
  return {p.tpl};
}

std::string ConstraintGraph::fresh_name(const std::string& base) {
  std::size_t& k = next_suffix[base];
  for (;;) {
    ++k;
    std::string name = base + "#" + std::to_string(k);
    if (used_names.insert(name).second) return name;
  }
}

ConstraintGraph build_constraint_graph(const HybridAutomaton& a) {
  ConstraintGraph cg;
  cg.automaton = a;
  for (const auto& m : a.modes) {
    cg.vertices[m.id].tpl = m.id;
    cg.template_mode[m.id] = m.id;
    cg.used_names.insert(m.id);
  }
  for (const auto& t : a.transitions) {
    const EdgeConstraint e{t.id, t.source, t.target};
    if (t.is_self_loop()) {
      cg.vertices.at(t.source).self_loops.push_back(e);
    } else {
      cg.edges[{t.source, t.target}].push_back(e);
    }
  }
  return cg;
}

const char* to_string(StepKind k) {
  switch (k) {
    case StepKind::kReduction:
      return "reduction";
    case StepKind::kModeSplit:
      return "mode-split";
    case StepKind::kRelax:
      return "relax";
    case StepKind::kReconstruct:
      return "reconstruct";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kStable:
      return "stable";
    case Verdict::kFailed:
      return "failed";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

void DecompositionTrace::record(StepKind kind, std::vector<std::string> subjects, double millis) {
  if (kind == StepKind::kReduction) ++reductions;
  if (kind == StepKind::kModeSplit) ++splittings;
  steps.push_back({kind, std::move(subjects), millis});
}

void DecompositionTrace::append(const DecompositionTrace& other) {
  steps.insert(steps.end(), other.steps.begin(), other.steps.end());
  reductions += other.reductions;
  splittings += other.splittings;
}

std::size_t DecompositionTrace::count(StepKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [&](const TraceStep& s) { return s.kind == kind; }));
}

std::string DecompositionTrace::to_text() const {
  std::string out;
  char ms[32];
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::string subjects;
    for (const auto& s : steps[i].subjects) {
      if (!subjects.empty()) subjects += ',';
      subjects += s;
    }
    if (subjects.empty()) subjects = "-";
    std::snprintf(ms, sizeof(ms), "%.3f", steps[i].millis);
    out += std::to_string(i + 1) + " " + to_string(steps[i].kind) + " " + subjects + " " + ms + "\n";
  }
  out += "TOTALS reductions=" + std::to_string(reductions) +
         " splittings=" + std::to_string(splittings) + "\n";
  return out;
}

namespace {

bool plain(const Digraph& h, const VertexId& v) {
  return h.in_degree(v) == 1 && h.out_degree(v) == 1;
}

// A cycle is outer iff every vertex but at most one has no edge besides its
// two cycle edges, so outer cycles are the chains of such plain vertices
// that leave some vertex and come back to it.
std::optional<Cycle> first_outer_cycle(const Digraph& h) {
  std::optional<Cycle> best;
  for (const auto& b : h.vertices()) {
    for (const auto& w : h.successors(b)) {
      std::vector<VertexId> path{b};
      VertexId x = w;
      while (x != b && plain(h, x) && path.size() <= h.vertex_count()) {
        path.push_back(x);
        x = h.successors(x).front();
      }
      if (x != b) continue;
      Cycle c = normalized_cycle(std::move(path));
      if (!best || cycle_order(c, *best)) best = std::move(c);
    }
  }
  return best;
}

// Depth-first count of simple paths from `from` to `to` inside `allowed`,
// stopping at two. Every expansion counts against `budget`.
std::size_t count_paths(const Digraph& h, const VertexId& from, const VertexId& to,
                        std::set<VertexId>* allowed, std::size_t* budget, std::size_t limit) {
  if (from == to) return 1;
  if (*budget == 0) throw CycleOverflow(limit);
  --*budget;
  allowed->erase(from);
  std::size_t found = 0;
  for (const auto& w : h.successors(from)) {
    if (!allowed->count(w)) continue;
    found += count_paths(h, w, to, allowed, budget, limit);
    if (found >= 2) break;
  }
  allowed->insert(from);
  return found;
}

// Whether `v` lies on two distinct simple cycles of its component. Two
// edges into or out of v inside the component already give two; otherwise
// every cycle through u -> v -> w is a simple path from w back to u.
bool on_two_cycles(const Digraph& h, const VertexId& v, const std::set<VertexId>& component,
                   std::size_t limit) {
  std::vector<VertexId> ins, outs;
  for (const auto& u : h.predecessors(v)) {
    if (component.count(u)) ins.push_back(u);
  }
  for (const auto& w : h.successors(v)) {
    if (component.count(w)) outs.push_back(w);
  }
  if (ins.size() >= 2 || outs.size() >= 2) return true;
  if (ins.empty() || outs.empty() || ins.front() == outs.front()) return false;
  // Only vertices that still reach u without passing v can help.
  std::set<VertexId> allowed{ins.front()};
  std::vector<VertexId> work{ins.front()};
  while (!work.empty()) {
    const VertexId x = work.back();
    work.pop_back();
    for (const auto& y : h.predecessors(x)) {
      if (y != v && component.count(y) && allowed.insert(y).second) work.push_back(y);
    }
  }
  if (!allowed.count(outs.front())) return false;
  std::size_t budget = limit;
  return count_paths(h, outs.front(), ins.front(), &allowed, &budget, limit) >= 2;
}

}  // namespace

NextStep select_next_step(const Digraph& g, std::size_t cycle_limit) {
  const Digraph h = g.without_self_loops();
  const SccDecomposition scc = scc_decompose(h);
  std::vector<std::set<VertexId>> cyclic;
  for (const auto& comp : scc.components) {
    if (comp.size() >= 2) cyclic.emplace_back(comp.begin(), comp.end());
  }
  NextStep step;
  if (cyclic.empty()) return step;
  if (cyclic.size() == 1) {
    // A strongly connected component with as many edges as vertices is a
    // single cycle.
    const auto& comp = cyclic.front();
    std::size_t inside = 0;
    for (const auto& v : comp) {
      for (const auto& w : h.successors(v)) inside += comp.count(w);
    }
    if (inside == comp.size()) {
      // Each vertex has exactly one successor inside the component.
      auto next = [&](const VertexId& v) {
        for (const auto& w : h.successors(v)) {
          if (comp.count(w)) return w;
        }
        throw std::logic_error("cycle walk left its component");
      };
      std::vector<VertexId> walk{*comp.begin()};
      for (VertexId x = next(walk.front()); x != walk.front(); x = next(x)) walk.push_back(x);
      step.cycle = normalized_cycle(std::move(walk));
      return step;
    }
  }
  if (auto c = first_outer_cycle(h)) {
    step.kind = NextStep::Kind::kReduce;
    step.cycle = std::move(c);
    return step;
  }
  std::vector<std::pair<std::size_t, VertexId>> candidates;
  std::map<VertexId, const std::set<VertexId>*> component_of;
  for (const auto& comp : cyclic) {
    for (const auto& v : comp) {
      const std::size_t product = h.in_degree(v) * h.out_degree(v);
      if (product >= 2) candidates.emplace_back(product, v);
      component_of[v] = &comp;
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& [product, v] : candidates) {
    if (on_two_cycles(h, v, *component_of.at(v), cycle_limit)) {
      step.kind = NextStep::Kind::kSplit;
      step.vertex = v;
      return step;
    }
  }
  // No vertex lies on two cycles, so every cyclic component is one cycle;
  // they only look attached through edges between components.
  std::optional<Cycle> first;
  for (const auto& comp : cyclic) {
    std::vector<VertexId> walk{*comp.begin()};
    for (VertexId x = walk.front();;) {
      for (const auto& w : h.successors(x)) {
        if (comp.count(w)) {
          x = w;
          break;
        }
      }
      if (x == walk.front()) break;
      walk.push_back(x);
    }
    Cycle c = normalized_cycle(std::move(walk));
    if (!first || cycle_order(c, *first)) first = std::move(c);
  }
  step.kind = NextStep::Kind::kReduce;
  step.cycle = std::move(first);
  return step;
}

NextStep select_next_step(const ConstraintGraph& cg, std::size_t cycle_limit) {
  return select_next_step(cg.digraph(), cycle_limit);
}

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string rename(const std::map<std::string, std::string>& names, const std::string& id) {
  auto it = names.find(id);
  return it == names.end() ? id : it->second;
}

// Position of the bracket closing the one opened at `open`.
std::size_t closing(const std::string& s, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < s.size(); ++i) {
    if (s[i] == '[') ++depth;
    if (s[i] == ']' && --depth == 0) return i;
  }
  return std::string::npos;
}

std::string rename_lmi(const std::string& lmi, const std::map<std::string, std::string>& names) {
  const std::size_t open = lmi.find('[');
  const std::size_t close = open == std::string::npos ? open : closing(lmi, open);
  if (close == std::string::npos) return lmi;
  const std::string kind = lmi.substr(0, open);
  const std::string inner = lmi.substr(open + 1, close - open - 1);
  const std::string rest = lmi.substr(close + 1);
  if (kind == "jump") {
    const std::size_t bar = inner.find('|');
    const std::size_t arrow = inner.find('>', bar);
    if (bar == std::string::npos || arrow == std::string::npos) return lmi;
    return kind + "[" + inner.substr(0, bar + 1) +
           rename(names, inner.substr(bar + 1, arrow - bar - 1)) + ">" +
           rename(names, inner.substr(arrow + 1)) + "]" + rest;
  }
  return kind + "[" + rename(names, inner) + "]" + rest;
}

EdgeConstraint renamed(const EdgeConstraint& e, const std::map<std::string, std::string>& names) {
  return {e.transition, rename(names, e.src_tpl), rename(names, e.dst_tpl)};
}

Obligations renamed(const Obligations& o, const std::map<std::string, std::string>& names) {
  Obligations out;
  for (const auto& [mode, tpl] : o.modes) out.modes.emplace_back(mode, rename(names, tpl));
  for (const auto& j : o.jumps) out.jumps.push_back(renamed(j, names));
  for (const auto& [region, count] : o.conics) out.conics.emplace_back(rename(names, region), count);
  return out;
}

std::string base_name(const std::string& id) { return id.substr(0, id.find('#')); }

std::string new_region_id(ConstraintGraph* cg) {
  for (std::size_t k = cg->regions.size() + 1;; ++k) {
    std::string id = "R" + std::to_string(k);
    if (cg->used_names.insert(id).second) return id;
  }
}

// Deep copy of region `top` under the id `copy`; every housed template and
// nested region gets a fresh name. Returns the renaming.
std::map<std::string, std::string> copy_region(ConstraintGraph* cg, const std::string& top,
                                               const std::string& copy) {
  std::map<std::string, std::string> names;
  std::vector<std::string> region_ids;
  std::function<void(const std::string&)> collect = [&](const std::string& r) {
    names[r] = r == top ? copy : cg->fresh_name(base_name(r));
    region_ids.push_back(r);
    for (const auto& n : cg->regions.at(r).nested) collect(n);
  };
  collect(top);
  for (const auto& t : cg->regions.at(top).templates) {
    const std::string mode = cg->template_mode.at(t);
    const std::string fresh = cg->fresh_name(mode);
    names[t] = fresh;
    cg->template_mode[fresh] = mode;
  }
  for (const auto& r : region_ids) {
    const Region& old = cg->regions.at(r);
    Region nr;
    nr.id = names.at(r);
    for (const auto& t : old.templates) nr.templates.push_back(rename(names, t));
    for (const auto& n : old.nested) nr.nested.push_back(rename(names, n));
    for (const auto& cand : old.candidates) {
      Assignment a;
      for (const auto& [id, v] : cand) a[rename_unknown(id, names)] = v;
      nr.candidates.push_back(std::move(a));
    }
    nr.candidate_count = old.candidate_count;
    nr.obligations = renamed(old.obligations, names);
    nr.modes = old.modes;
    nr.transitions = old.transitions;
    cg->regions[nr.id] = std::move(nr);
  }
  return names;
}

void erase_region(ConstraintGraph* cg, const std::string& r) {
  auto it = cg->regions.find(r);
  if (it == cg->regions.end()) return;
  const std::vector<std::string> nested = it->second.nested;
  cg->regions.erase(it);
  for (const auto& n : nested) erase_region(cg, n);
}

void remove_vertex(ConstraintGraph* cg, const std::string& v) {
  cg->vertices.erase(v);
  for (auto it = cg->edges.begin(); it != cg->edges.end();) {
    if (it->first.first == v || it->first.second == v) {
      it = cg->edges.erase(it);
    } else {
      ++it;
    }
  }
}

const Mode& mode_of(const ConstraintGraph& cg, const std::string& tpl) {
  const Mode* m = cg.automaton.find_mode(cg.template_mode.at(tpl));
  if (!m) throw std::logic_error("template \"" + tpl + "\" refers to no mode");
  return *m;
}

const Transition& transition_of(const ConstraintGraph& cg, const std::string& id) {
  const Transition* t = cg.automaton.find_transition(id);
  if (!t) throw std::logic_error("constraint refers to unknown transition \"" + id + "\"");
  return *t;
}

QuadraticTemplate fresh_template(const HybridAutomaton& a,
                                 const std::map<std::string, std::string>& template_mode,
                                 const std::string& tpl) {
  const Mode* m = a.find_mode(template_mode.at(tpl));
  if (!m) throw std::logic_error("template \"" + tpl + "\" refers to no mode");
  return QuadraticTemplate::fresh(tpl, a.dimension(), active_indices(a, *m));
}

Obligations obligations_of(const Fragment& f, const ConstraintGraph& cg) {
  Obligations o;
  for (const auto& m : f.modes) o.modes.emplace_back(cg.template_mode.at(m.tpl), m.tpl);
  for (const auto& j : f.jumps) o.jumps.push_back({j.transition.id, j.src_tpl, j.dst_tpl});
  for (const auto& c : f.conics) o.conics.emplace_back(c.region, c.count);
  return o;
}

// Modes housed by the vertices and every transition internal to them or
// joining two of them.
FailedSubgraph describe(const ConstraintGraph& cg, const std::set<std::string>& members,
                        std::string reason) {
  FailedSubgraph out;
  out.reason = std::move(reason);
  for (const auto& v : members) {
    const auto prov = cg.provenance(v);
    out.modes.insert(prov.begin(), prov.end());
    const VertexPayload& p = cg.vertices.at(v);
    for (const auto& e : p.self_loops) out.transitions.insert(e.transition);
    if (p.is_region()) {
      const auto& t = cg.regions.at(p.region).transitions;
      out.transitions.insert(t.begin(), t.end());
    }
  }
  for (const auto& [key, constraints] : cg.edges) {
    if (members.count(key.first) && members.count(key.second)) {
      for (const auto& e : constraints) out.transitions.insert(e.transition);
    }
  }
  return out;
}

void add_expansion(const Region& r, const Assignment& coefficients, Assignment* values) {
  for (std::size_t k = 0; k < r.candidates.size(); ++k) {
    auto it = coefficients.find(conic_coefficient_id(r.id, k));
    const double c = it == coefficients.end() ? 0.0 : it->second;
    if (c == 0.0) continue;
    for (const auto& [id, v] : r.candidates[k]) (*values)[id] += c * v;
  }
}

}  // namespace

std::string rename_unknown(const std::string& id, const std::map<std::string, std::string>& names) {
  const std::size_t open = id.find('[');
  const std::size_t close = open == std::string::npos ? open : closing(id, open);
  if (close == std::string::npos) return id;
  const std::string kind = id.substr(0, open);
  const std::string inner = id.substr(open + 1, close - open - 1);
  const std::string rest = id.substr(close + 1);
  if (kind == "lam") return kind + "[" + rename_lmi(inner, names) + "]" + rest;
  return kind + "[" + rename(names, inner) + "]" + rest;
}

std::vector<std::string> mode_split(ConstraintGraph* cg, const std::string& v,
                                    const std::set<std::string>& scope) {
  const VertexPayload old = cg->vertices.at(v);
  using EdgeList = std::vector<std::pair<std::string, std::vector<EdgeConstraint>>>;
  EdgeList in_scope, out_scope, in_other, out_other;
  for (const auto& [key, constraints] : cg->edges) {
    if (key.second == v) {
      (scope.count(key.first) ? in_scope : in_other).emplace_back(key.first, constraints);
    } else if (key.first == v) {
      (scope.count(key.second) ? out_scope : out_other).emplace_back(key.second, constraints);
    }
  }
  if (in_scope.empty() || out_scope.empty()) {
    throw std::invalid_argument("mode_split: vertex \"" + v +
                                "\" needs incoming and outgoing edges in scope");
  }
  const std::string base =
      old.is_region() ? base_name(old.region) : cg->template_mode.at(old.tpl);
  std::vector<std::string> copies;
  for (const auto& [from, in_constraints] : in_scope) {
    for (const auto& [to, out_constraints] : out_scope) {
      const std::string name = cg->fresh_name(base);
      std::map<std::string, std::string> names;
      VertexPayload payload;
      if (old.is_region()) {
        if (cg->counting) {
          Region r;
          r.id = name;
          r.candidate_count = cg->regions.at(old.region).candidate_count;
          r.modes = cg->regions.at(old.region).modes;
          r.transitions = cg->regions.at(old.region).transitions;
          cg->regions[name] = std::move(r);
          names[old.region] = name;
        } else {
          names = copy_region(cg, old.region, name);
        }
        payload.region = name;
      } else {
        names[old.tpl] = name;
        cg->template_mode[name] = cg->template_mode.at(old.tpl);
        payload.tpl = name;
      }
      for (const auto& e : old.self_loops) payload.self_loops.push_back(renamed(e, names));
      cg->vertices[name] = std::move(payload);
      auto attach_in = [&](const std::string& u, const std::vector<EdgeConstraint>& cs) {
        auto& list = cg->edges[{u, name}];
        for (const auto& e : cs) list.push_back(renamed(e, names));
      };
      auto attach_out = [&](const std::string& w, const std::vector<EdgeConstraint>& cs) {
        auto& list = cg->edges[{name, w}];
        for (const auto& e : cs) list.push_back(renamed(e, names));
      };
      attach_in(from, in_constraints);
      attach_out(to, out_constraints);
      for (const auto& [u, cs] : in_other) attach_in(u, cs);
      for (const auto& [w, cs] : out_other) attach_out(w, cs);
      copies.push_back(name);
    }
  }
  remove_vertex(cg, v);
  if (old.is_region()) erase_region(cg, old.region);
  return copies;
}

std::vector<std::string> mode_split(ConstraintGraph* cg, const std::string& v) {
  std::set<std::string> scope;
  for (const auto& [id, payload] : cg->vertices) scope.insert(id);
  return mode_split(cg, v, scope);
}

CandidateSet SdpBackend::candidates(const SDPProblem& p, std::size_t k, std::uint64_t seed) {
  return extract_candidate_llfs(p, k, seed, opts_);
}

SolveResult SdpBackend::solve(const SDPProblem& p, std::uint64_t seed) {
  return solve_feasibility(p, seed, opts_);
}

Fragment build_fragment(const ConstraintGraph& cg, const std::vector<std::string>& vertices,
                        const std::vector<std::pair<std::string, std::string>>& edges) {
  Fragment f;
  f.dimension = cg.automaton.dimension();
  std::map<std::string, std::string> housed_by;
  auto add_jump = [&](const EdgeConstraint& e) {
    f.jumps.push_back({transition_of(cg, e.transition), e.src_tpl, e.dst_tpl});
  };
  for (const auto& v : vertices) {
    const VertexPayload& p = cg.vertices.at(v);
    if (p.is_region()) {
      const Region& r = cg.regions.at(p.region);
      for (const auto& t : r.templates) housed_by[t] = r.id;
      f.conics.push_back({r.id, r.candidate_count});
    } else {
      f.templates.emplace(p.tpl, fresh_template(cg.automaton, cg.template_mode, p.tpl));
      f.modes.push_back({mode_of(cg, p.tpl), p.tpl});
    }
    for (const auto& e : p.self_loops) add_jump(e);
  }
  for (const auto& key : edges) {
    for (const auto& e : cg.edges.at(key)) add_jump(e);
  }
  for (const auto& j : f.jumps) {
    for (const std::string& t : {j.src_tpl, j.dst_tpl}) {
      if (f.templates.count(t)) continue;
      auto it = housed_by.find(t);
      if (it == housed_by.end()) {
        throw std::logic_error("fragment: template \"" + t + "\" is not housed by its vertices");
      }
      const Region& r = cg.regions.at(it->second);
      const QuadraticTemplate base = fresh_template(cg.automaton, cg.template_mode, t);
      std::vector<Eigen::MatrixXd> mats;
      for (const auto& cand : r.candidates) mats.push_back(base.evaluate(cand));
      f.templates.emplace(t, QuadraticTemplate::conical(t, f.dimension, base.active, r.id, mats));
    }
  }
  return f;
}

std::string reduce_cycle(ConstraintGraph* cg, const Cycle& c, LyapunovBackend* backend,
                         const DecomposeOptions& opts, SDPProblem* fragment_problem) {
  if (!cg->counting && backend == nullptr) {
    throw std::invalid_argument("reduce_cycle: a backend is required unless counting");
  }
  const std::set<std::string> members(c.vertices.begin(), c.vertices.end());
  std::vector<std::pair<std::string, std::string>> internal;
  for (const auto& [key, constraints] : cg->edges) {
    if (members.count(key.first) && members.count(key.second)) internal.push_back(key);
  }
  const FailedSubgraph covered = describe(*cg, members, "");

  Region region;
  region.id = new_region_id(cg);
  region.modes = covered.modes;
  region.transitions = covered.transitions;
  if (cg->counting) {
    region.candidate_count = 1;
  } else {
    const Fragment f = build_fragment(*cg, c.vertices, internal);
    SDPProblem p = assemble_sdp(f, opts.generation);
    if (!opts.export_dir.empty()) write_sdpa_file(p, opts.export_dir + "/" + region.id + ".dat-s");
    CandidateSet cs;
    try {
      cs = backend->candidates(p, opts.candidates, opts.seed);
    } catch (const InfeasibleProblem& e) {
      throw ReductionFailure(e.what(), c, e.status());
    }
    if (cs.candidates.empty()) {
      throw ReductionFailure("backend returned no candidates", c, SolveStatus::kInconclusive);
    }
    region.obligations = obligations_of(f, *cg);
    for (const auto& v : c.vertices) {
      const VertexPayload& payload = cg->vertices.at(v);
      const auto housed = cg->housed_templates(v);
      region.templates.insert(region.templates.end(), housed.begin(), housed.end());
      if (payload.is_region()) {
        region.nested.push_back(payload.region);
        region.obligations.append(cg->regions.at(payload.region).obligations);
      }
    }
    for (const auto& y : cs.candidates) {
      Assignment cand = y;
      for (const auto& n : region.nested) add_expansion(cg->regions.at(n), y, &cand);
      region.candidates.push_back(std::move(cand));
    }
    region.candidate_count = region.candidates.size();
    if (fragment_problem) *fragment_problem = std::move(p);
  }

  std::map<std::pair<std::string, std::string>, std::vector<EdgeConstraint>> kept;
  for (auto& [key, constraints] : cg->edges) {
    const bool from_in = members.count(key.first) != 0;
    const bool to_in = members.count(key.second) != 0;
    if (from_in && to_in) continue;
    const std::pair<std::string, std::string> nk{from_in ? region.id : key.first,
                                                 to_in ? region.id : key.second};
    auto& list = kept[nk];
    list.insert(list.end(), constraints.begin(), constraints.end());
  }
  cg->edges = std::move(kept);
  for (const auto& v : members) cg->vertices.erase(v);
  cg->vertices[region.id].region = region.id;
  const std::string id = region.id;
  cg->regions[id] = std::move(region);
  return id;
}

SDPProblem obligations_problem(const HybridAutomaton& a,
                               const std::map<std::string, std::string>& template_mode,
                               const Obligations& obligations, const GenerationOptions& opts) {
  Fragment f;
  f.dimension = a.dimension();
  auto tpl = [&](const std::string& t) {
    if (!f.templates.count(t)) f.templates.emplace(t, fresh_template(a, template_mode, t));
  };
  for (const auto& [mode, t] : obligations.modes) {
    tpl(t);
    const Mode* m = a.find_mode(mode);
    if (!m) throw std::logic_error("obligation refers to unknown mode \"" + mode + "\"");
    f.modes.push_back({*m, t});
  }
  for (const auto& j : obligations.jumps) {
    tpl(j.src_tpl);
    tpl(j.dst_tpl);
    const Transition* t = a.find_transition(j.transition);
    if (!t) throw std::logic_error("obligation refers to unknown transition \"" + j.transition + "\"");
    f.jumps.push_back({*t, j.src_tpl, j.dst_tpl});
  }
  for (const auto& [region, count] : obligations.conics) f.conics.push_back({region, count});
  return assemble_sdp(f, opts);
}

FailedSubgraph failed_subgraph_of(const DecompositionResult& r) {
  if (r.verdict == Verdict::kStable) {
    throw std::logic_error("failed_subgraph_of: the decomposition succeeded");
  }
  if (!r.failed_subgraph) throw std::logic_error("failed_subgraph_of: result carries no subgraph");
  return *r.failed_subgraph;
}

namespace {

struct Failure {
  Verdict verdict;
  FailedSubgraph subgraph;
};

Verdict verdict_of(SolveStatus s) {
  return s == SolveStatus::kInfeasible ? Verdict::kFailed : Verdict::kInconclusive;
}

std::set<std::string> all_vertices(const ConstraintGraph& cg) {
  std::set<std::string> out;
  for (const auto& [id, payload] : cg.vertices) out.insert(id);
  return out;
}

AssembledCertificate assemble_certificate(const ConstraintGraph& cg, const Obligations& all,
                                          Assignment values, const DecomposeOptions& opts) {
  AssembledCertificate out;
  GenerationOptions gen = opts.generation;
  double m_up = gen.class_k.eps_pos;
  std::map<std::string, Eigen::MatrixXd> templates;
  for (const auto& [mode, t] : all.modes) {
    if (templates.count(t)) continue;
    const Eigen::MatrixXd P = fresh_template(cg.automaton, cg.template_mode, t).evaluate(values);
    templates[t] = P;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
    m_up = std::max(m_up, es.eigenvalues().maxCoeff() * (1.0 + 1e-9) + 1e-12);
  }
  gen.class_k.m_up = m_up;
  out.problem = obligations_problem(cg.automaton, cg.template_mode, all, gen);
  Assignment kept;
  for (const auto& u : out.problem.unknowns) {
    auto it = values.find(u.id);
    double v = it == values.end() ? 0.0 : it->second;
    if (u.id.rfind("lam[upper[", 0) == 0) v = 0.0;
    kept[u.id] = v;
  }
  out.certificate.templates = std::move(templates);
  out.certificate.values = std::move(kept);
  out.certificate.class_k = gen.class_k;
  for (const auto& [region, count] : all.conics) {
    auto& cs = out.certificate.conical[region];
    for (std::size_t k = 0; k < count; ++k) {
      cs.push_back(out.certificate.values.at(conic_coefficient_id(region, k)));
    }
  }

  HybridAutomaton& h = out.certified;
  h.variables = cg.automaton.variables;
  h.convergence_set = cg.automaton.convergence_set;
  std::set<std::string> seen;
  for (const auto& [mode, t] : all.modes) {
    if (!seen.insert(t).second) continue;
    Mode m = *cg.automaton.find_mode(mode);
    m.id = t;
    h.modes.push_back(std::move(m));
  }
  std::map<std::string, std::size_t> instances;
  for (const auto& j : all.jumps) ++instances[j.transition];
  for (const auto& j : all.jumps) {
    Transition t = *cg.automaton.find_transition(j.transition);
    if (instances[j.transition] > 1) t.id = j.transition + ":" + j.src_tpl + ":" + j.dst_tpl;
    t.source = j.src_tpl;
    t.target = j.dst_tpl;
    h.transitions.push_back(std::move(t));
  }
  return out;
}

}  // namespace

DecompositionResult apply_decomposition(const HybridAutomaton& a, LyapunovBackend* backend,
                                        const DecomposeOptions& opts) {
  if (const auto v = validate_automaton(a); !v.empty()) {
    throw std::invalid_argument("apply_decomposition: invalid automaton: " + v.front());
  }
  const bool solve = opts.mode == RunMode::kSolve;
  if (solve && backend == nullptr) throw std::invalid_argument("apply_decomposition: no backend");

  DecompositionResult result;
  result.analyzed = a;
  ConstraintGraph cg = build_constraint_graph(a);
  cg.counting = !solve;
  std::map<std::string, Assignment> standalone;

  auto fail = [&](Verdict verdict, FailedSubgraph subgraph) {
    result.verdict = verdict;
    result.diagnostic = subgraph.reason;
    result.failed_subgraph = std::move(subgraph);
    return result;
  };

  const SccDecomposition scc = scc_decompose(cg.digraph().without_self_loops());
  for (const auto& component : scc.components) {
    if (component.size() == 1) {
      if (!solve) continue;
      const std::string& v = component.front();
      const Fragment f = build_fragment(cg, {v}, {});
      const SolveResult r = backend->solve(assemble_sdp(f, opts.generation), opts.seed);
      if (r.status != SolveStatus::kFeasible) {
        return fail(verdict_of(r.status),
                    describe(cg, {v}, "mode " + v + ": " + to_string(r.status) + ": " + r.message));
      }
      standalone[v] = r.assignment;
      continue;
    }
    std::set<std::string> scope(component.begin(), component.end());
    for (;;) {
      NextStep step;
      try {
        step = select_next_step(cg.digraph(scope), opts.cycle_limit);
      } catch (const CycleOverflow& e) {
        return fail(Verdict::kFailed, describe(cg, scope, e.what()));
      }
      if (step.kind == NextStep::Kind::kSplit) {
        const auto start = Clock::now();
        const auto copies = mode_split(&cg, step.vertex, scope);
        scope.erase(step.vertex);
        scope.insert(copies.begin(), copies.end());
        result.trace.record(StepKind::kModeSplit, {step.vertex}, millis_since(start));
        continue;
      }
      if (!step.cycle) break;
      const auto start = Clock::now();
      std::string region;
      try {
        region = reduce_cycle(&cg, *step.cycle, backend, opts);
      } catch (const ReductionFailure& e) {
        const std::set<std::string> members(e.cycle().vertices.begin(), e.cycle().vertices.end());
        std::string reason = "reduction of cycle ";
        for (const auto& v : e.cycle().vertices) reason += v + (v == e.cycle().vertices.back() ? "" : ",");
        reason += std::string(" failed: ") + e.what();
        return fail(verdict_of(e.status()), describe(cg, members, reason));
      }
      for (const auto& v : step.cycle->vertices) scope.erase(v);
      scope.insert(region);
      result.trace.record(StepKind::kReduction, step.cycle->vertices, millis_since(start));
      if (step.kind == NextStep::Kind::kDone) break;
    }
  }

  if (!solve) {
    result.verdict = Verdict::kInconclusive;
    result.diagnostic = "count-only run";
    return result;
  }

  std::vector<std::string> vertices;
  for (const auto& [id, payload] : cg.vertices) vertices.push_back(id);
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [key, constraints] : cg.edges) edges.push_back(key);
  const Fragment final_fragment = build_fragment(cg, vertices, edges);

  Assignment values;
  if (edges.empty()) {
    for (const auto& v : vertices) {
      const VertexPayload& p = cg.vertices.at(v);
      if (p.is_region()) {
        const Region& r = cg.regions.at(p.region);
        for (std::size_t k = 0; k < r.candidate_count; ++k) {
          values[conic_coefficient_id(r.id, k)] = k == 0 ? 1.0 : 0.0;
        }
        continue;
      }
      auto it = standalone.find(v);
      if (it == standalone.end()) {
        const SolveResult r =
            backend->solve(assemble_sdp(build_fragment(cg, {v}, {}), opts.generation), opts.seed);
        if (r.status != SolveStatus::kFeasible) {
          return fail(verdict_of(r.status),
                      describe(cg, {v}, "mode " + v + ": " + to_string(r.status) + ": " + r.message));
        }
        it = standalone.emplace(v, r.assignment).first;
      }
      values.insert(it->second.begin(), it->second.end());
    }
  } else {
    const SolveResult r = backend->solve(assemble_sdp(final_fragment, opts.generation), opts.seed);
    if (r.status != SolveStatus::kFeasible) {
      return fail(verdict_of(r.status),
                  describe(cg, all_vertices(cg),
                           std::string("final assembly: ") + to_string(r.status) + ": " + r.message));
    }
    values = r.assignment;
  }

  Obligations all = obligations_of(final_fragment, cg);
  Assignment coefficients = values;
  for (const auto& v : vertices) {
    const VertexPayload& p = cg.vertices.at(v);
    if (!p.is_region()) continue;
    const Region& r = cg.regions.at(p.region);
    all.append(r.obligations);
    add_expansion(r, coefficients, &values);
  }

  AssembledCertificate cert = assemble_certificate(cg, all, std::move(values), opts);
  const ExactCheckResult check = check_certificate_exact(cert.problem, cert.certificate, opts.tol_eig);
  if (!check.pass) {
    return fail(Verdict::kInconclusive,
                describe(cg, all_vertices(cg), "assembled certificate rejected: " + check.details));
  }
  result.verdict = Verdict::kStable;
  result.certificate = std::move(cert);
  return result;
}

DecompositionResult apply_decomposition(const HybridAutomaton& a, const DecomposeOptions& opts) {
  SdpBackend backend;
  return apply_decomposition(a, &backend, opts);
}

}  // namespace lyapdecomp
