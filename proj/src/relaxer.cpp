#include "lyapdecomp/relaxer.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>
#include <stdexcept>

#include "lyapdecomp/linprog.hpp"

namespace lyapdecomp {

const SplitTransitionPair* SplitRegistry::find(const std::string& origin) const {
  for (const auto& p : pairs) {
    if (p.origin == origin) return &p;
  }
  return nullptr;
}

std::string central_mode_id(const HybridAutomaton& a) {
  if (!a.find_mode("m_c")) return "m_c";
  for (std::size_t k = 1;; ++k) {
    std::string id = "m_c#" + std::to_string(k);
    if (!a.find_mode(id)) return id;
  }
}

std::string first_part_id(const std::string& origin) { return origin + "#to_c"; }
std::string second_part_id(const std::string& origin) { return origin + "#from_c"; }

RelaxResult relax(const HybridAutomaton& a, const std::set<std::string>& dense) {
  if (dense.empty()) throw std::invalid_argument("relax: the dense set is empty");
  for (const auto& m : dense) {
    if (!a.find_mode(m)) throw std::invalid_argument("relax: unknown mode \"" + m + "\"");
  }
  const std::size_t n = a.dimension();
  RelaxResult out;
  out.automaton = a;
  out.automaton.transitions.clear();
  out.registry.central_mode = central_mode_id(a);
  const std::string& mc = out.registry.central_mode;

  std::set<std::string> ids;
  for (const auto& t : a.transitions) ids.insert(t.id);
  for (const auto& t : a.transitions) {
    if (!dense.count(t.source) && !dense.count(t.target)) {
      out.automaton.transitions.push_back(t);
      continue;
    }
    SplitTransitionPair pair;
    pair.origin = t.id;
    pair.first = {first_part_id(t.id), t.source, mc, t.guard, AffineMap::identity(n)};
    pair.second = {second_part_id(t.id), mc, t.target, t.guard, t.update};
    for (const auto* part : {&pair.first, &pair.second}) {
      if (ids.count(part->id)) {
        throw std::invalid_argument("relax: transition id \"" + part->id + "\" already exists");
      }
    }
    out.automaton.transitions.push_back(pair.first);
    out.automaton.transitions.push_back(pair.second);
    out.registry.pairs.push_back(std::move(pair));
  }
  std::sort(out.registry.pairs.begin(), out.registry.pairs.end(),
            [](const auto& l, const auto& r) { return l.origin < r.origin; });

  Mode central;
  central.id = mc;
  central.flow = AffineDynamics::zero(n);
  central.invariant = Polyhedron::empty_set(n);
  central.converging_vars = a.variables.names;
  out.automaton.modes.push_back(std::move(central));
  return out;
}

RelaxResult reconstruct(const HybridAutomaton& a, const SplitRegistry& reg,
                        const std::string& origin) {
  const SplitTransitionPair* pair = reg.find(origin);
  if (!pair) throw std::invalid_argument("reconstruct: no split pair for \"" + origin + "\"");
  RelaxResult out;
  out.automaton = a;
  out.registry = reg;
  auto& ts = out.automaton.transitions;
  auto first = std::find_if(ts.begin(), ts.end(), [&](const Transition& t) { return t.id == pair->first.id; });
  if (first == ts.end()) throw std::invalid_argument("reconstruct: missing part " + pair->first.id);
  *first = {origin, pair->first.source, pair->second.target, pair->second.guard, pair->second.update};
  auto second = std::find_if(ts.begin(), ts.end(), [&](const Transition& t) { return t.id == pair->second.id; });
  if (second == ts.end()) throw std::invalid_argument("reconstruct: missing part " + pair->second.id);
  ts.erase(second);
  auto& ps = out.registry.pairs;
  ps.erase(std::find_if(ps.begin(), ps.end(), [&](const auto& p) { return p.origin == origin; }));
  if (ps.empty()) {
    auto& ms = out.automaton.modes;
    ms.erase(std::remove_if(ms.begin(), ms.end(), [&](const Mode& m) { return m.id == reg.central_mode; }),
             ms.end());
  }
  return out;
}

namespace {

double millis_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

DecompositionResult integrated_prove(const HybridAutomaton& a, const std::set<std::string>& dense,
                                     LyapunovBackend* backend, const DecomposeOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  RelaxResult current = relax(a, dense);
  DecompositionTrace trace;
  trace.record(StepKind::kRelax, {dense.begin(), dense.end()}, millis_since(start));
  std::size_t reconstructions = 0;
  auto finish = [&](DecompositionResult r) {
    trace.append(r.trace);
    r.trace = std::move(trace);
    r.reconstructions = reconstructions;
    return r;
  };

  while (!current.registry.pairs.empty()) {
    DecompositionResult r = apply_decomposition(current.automaton, backend, opts);
    if (r.verdict == Verdict::kStable || opts.mode == RunMode::kCountOnly || !r.failed_subgraph) {
      return finish(std::move(r));
    }
    const auto& failed = r.failed_subgraph->transitions;
    const SplitTransitionPair* pick = nullptr;
    for (const auto& p : current.registry.pairs) {
      if (failed.count(p.first.id) || failed.count(p.second.id)) {
        pick = &p;
        break;
      }
    }
    if (!pick) return finish(std::move(r));
    trace.append(r.trace);
    start = std::chrono::steady_clock::now();
    const std::string origin = pick->origin;
    current = reconstruct(current.automaton, current.registry, origin);
    ++reconstructions;
    trace.record(StepKind::kReconstruct, {origin}, millis_since(start));
  }
  return finish(apply_decomposition(a, backend, opts));
}

DecompositionResult integrated_prove(const HybridAutomaton& a, const std::set<std::string>& dense,
                                     const DecomposeOptions& opts) {
  SdpBackend backend;
  return integrated_prove(a, dense, &backend, opts);
}

namespace {

Polyhedron widen(const Polyhedron& p) {
  Polyhedron out;
  out.dimension = p.dimension + 1;
  for (const auto& r : p.rows) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.dimension));
    a.head(r.a.size()) = r.a;
    out.add_row(std::move(a), r.b);
  }
  return out;
}

AffineMap widen(const AffineMap& f, bool keep_last) {
  const auto n = f.offset.size();
  AffineMap out{Eigen::MatrixXd::Zero(n + 1, n + 1), Eigen::VectorXd::Zero(n + 1)};
  out.matrix.topLeftCorner(n, n) = f.matrix;
  out.offset.head(n) = f.offset;
  if (keep_last) out.matrix(n, n) = 1.0;
  return out;
}

}  // namespace

HybridAutomaton tag_split_transitions(const HybridAutomaton& a, const SplitRegistry& reg) {
  if (reg.pairs.empty()) throw std::invalid_argument("tag_split_transitions: no split pairs");
  HybridAutomaton out = a;
  std::string tag = "tag";
  for (std::size_t k = 1; a.variables.index_of(tag); ++k) tag = "tag#" + std::to_string(k);
  out.variables.names.push_back(tag);
  const auto n = static_cast<Eigen::Index>(a.dimension());

  for (auto& m : out.modes) {
    for (auto& v : m.flow.vertices) v = widen(v, false);
    m.invariant = widen(m.invariant);
  }
  std::map<std::string, std::size_t> first_of, second_of;
  for (std::size_t i = 0; i < reg.pairs.size(); ++i) {
    first_of[reg.pairs[i].first.id] = i + 1;
    second_of[reg.pairs[i].second.id] = i + 1;
  }
  for (auto& t : out.transitions) {
    t.guard = widen(t.guard);
    if (auto it = first_of.find(t.id); it != first_of.end()) {
      t.update = widen(t.update, false);
      t.update.offset(n) = static_cast<double>(it->second);
    } else {
      t.update = widen(t.update, true);
    }
    if (auto it = second_of.find(t.id); it != second_of.end()) {
      const double i = static_cast<double>(it->second);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
      e(n) = 1.0;
      t.guard.add_row(e, i);
      t.guard.add_row(-e, -i);
    }
  }
  return out;
}

CompositionCount count_compositions(const HybridAutomaton& relaxed, const SplitRegistry& reg) {
  std::map<std::string, const Transition*> parts;
  for (const auto& t : relaxed.transitions) parts[t.id] = &t;
  CompositionCount out;
  for (const auto& p : reg.pairs) {
    const Transition* first = parts.at(p.first.id);
    for (const auto& q : reg.pairs) {
      const Transition* second = parts.at(q.second.id);
      // x in G1 and U1 x in G2.
      Polyhedron both = first->guard;
      for (const auto& r : second->guard.rows) {
        both.add_row(first->update.matrix.transpose() * r.a, r.b - r.a.dot(first->update.offset));
      }
      if (is_empty(both)) continue;
      ++out.composable;
      if (p.origin != q.origin) ++out.spurious;
    }
  }
  return out;
}

std::set<std::string> resolve_dense(const HybridAutomaton& a, const std::string& choice,
                                    double threshold) {
  std::set<std::string> out;
  if (choice == "none") return out;
  if (choice == "all") {
    for (const auto& m : a.modes) out.insert(m.id);
    return out;
  }
  if (choice == "auto") {
    if (const auto d = find_dense_subcomponent(underlying_digraph(a), threshold)) {
      out.insert(d->begin(), d->end());
    }
    return out;
  }
  std::stringstream s(choice);
  std::string id;
  while (std::getline(s, id, ',')) {
    if (id.empty()) continue;
    if (!a.find_mode(id)) throw std::invalid_argument("unknown mode \"" + id + "\" in dense set");
    out.insert(id);
  }
  if (out.empty()) throw std::invalid_argument("empty dense set \"" + choice + "\"");
  return out;
}

}  // namespace lyapdecomp
