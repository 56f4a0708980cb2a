#include "lyapdecomp/digraph.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace lyapdecomp {

void Digraph::add_vertex(const VertexId& v) {
  if (vertices_.insert(v).second) {
    out_[v];
    in_[v];
  }
}

void Digraph::add_edge(const VertexId& from, const VertexId& to) {
  if (!has_vertex(from) || !has_vertex(to)) {
    throw std::invalid_argument("add_edge: endpoint of (" + from + ", " + to +
                                ") is not a vertex");
  }
  if (edges_.emplace(from, to).second) {
    out_[from].insert(to);
    in_[to].insert(from);
  }
}

void Digraph::remove_vertex(const VertexId& v) {
  if (!has_vertex(v)) return;
  for (const auto& w : out_[v]) {
    in_[w].erase(v);
    edges_.erase({v, w});
  }
  for (const auto& w : in_[v]) {
    out_[w].erase(v);
    edges_.erase({w, v});
  }
  out_.erase(v);
  in_.erase(v);
  vertices_.erase(v);
}

bool Digraph::has_edge(const VertexId& from, const VertexId& to) const {
  return edges_.count({from, to}) != 0;
}

std::size_t Digraph::self_loop_count() const {
  std::size_t n = 0;
  for (const auto& [a, b] : edges_) n += (a == b);
  return n;
}

std::vector<VertexId> Digraph::successors(const VertexId& v) const {
  auto it = out_.find(v);
  if (it == out_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<VertexId> Digraph::predecessors(const VertexId& v) const {
  auto it = in_.find(v);
  if (it == in_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::size_t Digraph::in_degree(const VertexId& v) const {
  auto it = in_.find(v);
  return it == in_.end() ? 0 : it->second.size();
}

std::size_t Digraph::out_degree(const VertexId& v) const {
  auto it = out_.find(v);
  return it == out_.end() ? 0 : it->second.size();
}

Digraph Digraph::induced(const std::set<VertexId>& keep) const {
  Digraph g;
  for (const auto& v : vertices_) {
    if (keep.count(v)) g.add_vertex(v);
  }
  for (const auto& [a, b] : edges_) {
    if (keep.count(a) && keep.count(b)) g.add_edge(a, b);
  }
  return g;
}

Digraph Digraph::without_self_loops() const {
  Digraph g;
  for (const auto& v : vertices_) g.add_vertex(v);
  for (const auto& [a, b] : edges_) {
    if (a != b) g.add_edge(a, b);
  }
  return g;
}

bool Cycle::contains(const VertexId& v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

std::vector<std::pair<VertexId, VertexId>> Cycle::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    out.emplace_back(vertices[i], vertices[(i + 1) % vertices.size()]);
  }
  return out;
}

Cycle normalized_cycle(std::vector<VertexId> vertices) {
  if (!vertices.empty()) {
    auto smallest = std::min_element(vertices.begin(), vertices.end());
    std::rotate(vertices.begin(), smallest, vertices.end());
  }
  return Cycle{std::move(vertices)};
}

bool cycle_order(const Cycle& lhs, const Cycle& rhs) {
  if (lhs.length() != rhs.length()) return lhs.length() < rhs.length();
  return lhs.vertices < rhs.vertices;
}

namespace {

// Dense integer view of a digraph; vertex i is the i-th smallest id.
struct IndexedGraph {
  std::vector<VertexId> names;
  std::vector<std::vector<int>> out;

  explicit IndexedGraph(const Digraph& g) {
    names.assign(g.vertices().begin(), g.vertices().end());
    std::map<VertexId, int> index;
    for (std::size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
    out.resize(names.size());
    for (const auto& [a, b] : g.edges()) out[index[a]].push_back(index[b]);
    for (auto& o : out) std::sort(o.begin(), o.end());
  }
  int size() const { return static_cast<int>(names.size()); }
};

// Tarjan's algorithm restricted to vertices v with allowed[v]; returns the
// component id per vertex (-1 outside) and the number of components.
int tarjan(const IndexedGraph& g, const std::vector<char>& allowed, std::vector<int>* comp) {
  const int n = g.size();
  comp->assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int counter = 0;
  int ncomp = 0;
  struct Frame {
    int v;
    std::size_t next;
  };
  for (int root = 0; root < n; ++root) {
    if (!allowed[root] || index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.next < g.out[f.v].size()) {
        const int w = g.out[f.v][f.next++];
        if (!allowed[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          (*comp)[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
    }
  }
  return ncomp;
}

// Johnson's elementary circuit search.
class CircuitFinder {
 public:
  CircuitFinder(const IndexedGraph& g, std::size_t limit) : g_(g), limit_(limit) {}

  std::vector<Cycle> run() {
    const int n = g_.size();
    blocked_.assign(n, 0);
    block_map_.assign(n, {});
    for (int s = 0; s < n; ++s) {
      std::vector<char> allowed(n, 0);
      for (int v = s; v < n; ++v) allowed[v] = 1;
      std::vector<int> comp;
      tarjan(g_, allowed, &comp);
      in_component_.assign(n, 0);
      std::size_t size = 0;
      for (int v = s; v < n; ++v) {
        if (comp[v] == comp[s]) {
          in_component_[v] = 1;
          ++size;
        }
      }
      const bool self_loop = std::binary_search(g_.out[s].begin(), g_.out[s].end(), s);
      if (size == 1 && !self_loop) continue;
      for (int v = s; v < n; ++v) {
        if (in_component_[v]) {
          blocked_[v] = 0;
          block_map_[v].clear();
        }
      }
      start_ = s;
      circuit(s);
    }
    return std::move(found_);
  }

 private:
  bool circuit(int v) {
    bool closed = false;
    path_.push_back(v);
    blocked_[v] = 1;
    for (int w : g_.out[v]) {
      if (!in_component_[w]) continue;
      if (w == start_) {
        emit();
        closed = true;
      } else if (!blocked_[w]) {
        if (circuit(w)) closed = true;
      }
    }
    if (closed) {
      unblock(v);
    } else {
      for (int w : g_.out[v]) {
        if (in_component_[w]) block_map_[w].insert(v);
      }
    }
    path_.pop_back();
    return closed;
  }

  void unblock(int u) {
    std::vector<int> work{u};
    while (!work.empty()) {
      const int x = work.back();
      work.pop_back();
      if (!blocked_[x]) continue;
      blocked_[x] = 0;
      for (int w : block_map_[x]) work.push_back(w);
      block_map_[x].clear();
    }
  }

  void emit() {
    if (found_.size() >= limit_) throw CycleOverflow(limit_);
    std::vector<VertexId> names;
    names.reserve(path_.size());
    for (int v : path_) names.push_back(g_.names[v]);
    found_.push_back(Cycle{std::move(names)});
  }

  const IndexedGraph& g_;
  std::size_t limit_;
  int start_ = 0;
  std::vector<char> blocked_;
  std::vector<std::set<int>> block_map_;
  std::vector<char> in_component_;
  std::vector<int> path_;
  std::vector<Cycle> found_;
};

}  // namespace

SccDecomposition scc_decompose(const Digraph& g) {
  const IndexedGraph ig(g);
  const int n = ig.size();
  std::vector<int> comp;
  const int ncomp = tarjan(ig, std::vector<char>(n, 1), &comp);

  std::vector<std::vector<VertexId>> members(ncomp);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(ig.names[v]);
  std::vector<std::set<int>> succ(ncomp);
  std::vector<int> indeg(ncomp, 0);
  for (int v = 0; v < n; ++v) {
    for (int w : ig.out[v]) {
      if (comp[v] != comp[w] && succ[comp[v]].insert(comp[w]).second) ++indeg[comp[w]];
    }
  }

  // Kahn's algorithm; among ready components the one with the smallest
  // member comes first, which makes the order independent of Tarjan's.
  auto later = [&](int a, int b) { return members[a].front() > members[b].front(); };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (int c = 0; c < ncomp; ++c) {
    if (indeg[c] == 0) ready.push(c);
  }
  std::vector<int> order_of(ncomp, -1);
  SccDecomposition out;
  while (!ready.empty()) {
    const int c = ready.top();
    ready.pop();
    order_of[c] = static_cast<int>(out.components.size());
    out.components.push_back(members[c]);
    for (int d : succ[c]) {
      if (--indeg[d] == 0) ready.push(d);
    }
  }
  for (int v = 0; v < n; ++v) {
    out.component_of[ig.names[v]] = static_cast<std::size_t>(order_of[comp[v]]);
  }
  for (int c = 0; c < ncomp; ++c) {
    for (int d : succ[c]) {
      out.condensation_edges.emplace(order_of[c], order_of[d]);
    }
  }
  return out;
}

std::vector<Cycle> enumerate_simple_cycles(const Digraph& g, std::size_t max_cycles) {
  const IndexedGraph ig(g);
  std::vector<Cycle> cycles = CircuitFinder(ig, max_cycles).run();
  std::sort(cycles.begin(), cycles.end(), cycle_order);
  return cycles;
}

std::vector<EdgeCycle> enumerate_simple_cycles(const std::vector<VertexId>& vertices,
                                               const std::vector<LabeledEdge>& edges,
                                               bool concentrate, std::size_t max_cycles) {
  Digraph g;
  for (const auto& v : vertices) g.add_vertex(v);
  std::map<std::pair<VertexId, VertexId>, std::vector<std::string>> labels;
  for (const auto& e : edges) {
    g.add_edge(e.source, e.target);
    labels[{e.source, e.target}].push_back(e.label);
  }
  const std::vector<Cycle> base = enumerate_simple_cycles(g, max_cycles);
  std::vector<EdgeCycle> out;
  for (const auto& c : base) {
    std::vector<const std::vector<std::string>*> choices;
    for (const auto& e : c.edges()) choices.push_back(&labels.at(e));
    if (concentrate) {
      EdgeCycle ec{c, {}};
      for (const auto* ch : choices) ec.labels.push_back(ch->front());
      out.push_back(std::move(ec));
      continue;
    }
    std::vector<std::size_t> pick(choices.size(), 0);
    while (true) {
      if (out.size() >= max_cycles) throw CycleOverflow(max_cycles);
      EdgeCycle ec{c, {}};
      for (std::size_t i = 0; i < choices.size(); ++i) ec.labels.push_back((*choices[i])[pick[i]]);
      out.push_back(std::move(ec));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == choices[i]->size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }
  return out;
}

double graph_density(const Digraph& g) {
  const std::size_t n = g.vertex_count();
  if (n < 2) {
    throw UndefinedDensity("density is undefined for a graph with " + std::to_string(n) +
                           " vertices");
  }
  const std::size_t e = g.edge_count() - g.self_loop_count();
  const std::size_t max_e = n * (n - 1);
  return static_cast<double>(e) / static_cast<double>(max_e);
}

std::optional<std::vector<VertexId>> find_dense_subcomponent(const Digraph& g, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("density threshold must lie in (0, 1]");
  }
  Digraph h = g.without_self_loops();
  while (h.vertex_count() >= kMinDenseSize) {
    const double e = static_cast<double>(h.edge_count());
    const double n = static_cast<double>(h.vertex_count());
    if (e >= threshold * n * (n - 1) - 1e-12) {
      return std::vector<VertexId>(h.vertices().begin(), h.vertices().end());
    }
    const VertexId* victim = nullptr;
    std::size_t best = 0;
    for (const auto& v : h.vertices()) {
      const std::size_t d = h.in_degree(v) + h.out_degree(v);
      if (victim == nullptr || d < best) {
        victim = &v;
        best = d;
      }
    }
    const VertexId drop = *victim;
    h.remove_vertex(drop);
  }
  return std::nullopt;
}

std::set<VertexId> border_vertices(const Cycle& c, const Digraph& g) {
  std::set<std::pair<VertexId, VertexId>> own;
  for (const auto& e : c.edges()) own.insert(e);
  std::set<VertexId> out;
  for (const auto& v : c.vertices) {
    for (const auto& w : g.successors(v)) {
      if (w != v && !own.count({v, w})) out.insert(v);
    }
    for (const auto& w : g.predecessors(v)) {
      if (w != v && !own.count({w, v})) out.insert(v);
    }
  }
  return out;
}

}  // namespace lyapdecomp
