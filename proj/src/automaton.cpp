#include "lyapdecomp/automaton.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <set>
#include <sstream>
#include <stdexcept>

#include "lyapdecomp/digraph.hpp"

namespace lyapdecomp {

std::optional<std::size_t> VariableSet::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

bool operator==(const HalfSpace& lhs, const HalfSpace& rhs) {
  return lhs.b == rhs.b && lhs.a.size() == rhs.a.size() && lhs.a == rhs.a;
}

Polyhedron Polyhedron::universe(std::size_t n) { return Polyhedron{n, {}}; }

Polyhedron Polyhedron::empty_set(std::size_t n) {
  Polyhedron p{n, {}};
  p.add_row(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), -1.0);
  return p;
}

Polyhedron Polyhedron::box(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (lower.size() != upper.size()) throw std::invalid_argument("box: bound size mismatch");
  const auto n = static_cast<std::size_t>(lower.size());
  Polyhedron p{n, {}};
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(lower.size());
    e(i) = 1.0;
    p.add_row(e, upper(i));
    p.add_row(-e, -lower(i));
  }
  return p;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  if (other.dimension != dimension) throw std::invalid_argument("intersect: dimension mismatch");
  Polyhedron p = *this;
  p.rows.insert(p.rows.end(), other.rows.begin(), other.rows.end());
  return p;
}

bool Polyhedron::contains(const Eigen::VectorXd& x, double tol) const {
  for (const auto& r : rows) {
    if (r.a.dot(x) > r.b + tol) return false;
  }
  return true;
}

bool Polyhedron::trivially_empty() const {
  for (const auto& r : rows) {
    if (r.a.isZero(0.0) && r.b < 0.0) return true;
  }
  return false;
}

AffineMap AffineMap::identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return {Eigen::MatrixXd::Identity(m, m), Eigen::VectorXd::Zero(m)};
}

AffineMap AffineMap::zero(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return {Eigen::MatrixXd::Zero(m, m), Eigen::VectorXd::Zero(m)};
}

bool AffineMap::is_identity() const {
  return matrix.rows() == offset.size() && matrix.cols() == offset.size() &&
         matrix.isIdentity(0.0) && offset.isZero(0.0);
}

bool AffineMap::operator==(const AffineMap& other) const {
  return matrix.rows() == other.matrix.rows() && matrix.cols() == other.matrix.cols() &&
         offset.size() == other.offset.size() && matrix == other.matrix &&
         offset == other.offset;
}

AffineDynamics AffineDynamics::zero(std::size_t n) { return {{AffineMap::zero(n)}}; }

const Mode* HybridAutomaton::find_mode(const std::string& id) const {
  for (const auto& m : modes) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

Mode* HybridAutomaton::find_mode(const std::string& id) {
  for (auto& m : modes) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

const Transition* HybridAutomaton::find_transition(const std::string& id) const {
  for (const auto& t : transitions) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

namespace {

void check_polyhedron(const Polyhedron& p, std::size_t n, const std::string& owner,
                      std::vector<std::string>* out) {
  if (p.dimension != n) {
    out->push_back(owner + ": polyhedron dimension " + std::to_string(p.dimension) +
                   " does not match automaton dimension " + std::to_string(n));
  }
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    if (static_cast<std::size_t>(p.rows[i].a.size()) != n) {
      out->push_back(owner + ": row " + std::to_string(i) + " has " +
                     std::to_string(p.rows[i].a.size()) + " coefficients, expected " +
                     std::to_string(n));
    }
  }
}

void check_map(const AffineMap& f, std::size_t n, const std::string& owner,
               std::vector<std::string>* out) {
  const auto m = static_cast<Eigen::Index>(n);
  if (f.matrix.rows() != m || f.matrix.cols() != m || f.offset.size() != m) {
    std::ostringstream s;
    s << owner << ": affine map of dimension " << f.matrix.rows() << "x" << f.matrix.cols()
      << " with offset " << f.offset.size() << " in a " << n << "-dimensional automaton";
    out->push_back(s.str());
  }
}

// Unknown and LMI names embed ids between these delimiters.
bool valid_identifier(const std::string& id) {
  if (id.empty()) return false;
  for (char ch : id) {
    if (std::isspace(static_cast<unsigned char>(ch)) || std::strchr("[]()|>,", ch) != nullptr) {
      return false;
    }
  }
  return true;
}

bool lex_less(const HalfSpace& lhs, const HalfSpace& rhs) {
  const Eigen::Index k = std::min(lhs.a.size(), rhs.a.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    if (lhs.a(i) != rhs.a(i)) return lhs.a(i) < rhs.a(i);
  }
  if (lhs.a.size() != rhs.a.size()) return lhs.a.size() < rhs.a.size();
  return lhs.b < rhs.b;
}

Polyhedron shift_polyhedron(const Polyhedron& p, const Eigen::VectorXd& point) {
  Polyhedron q = p;
  for (auto& r : q.rows) r.b -= r.a.dot(point);
  return q;
}

Polyhedron canonical_polyhedron(Polyhedron p) {
  std::stable_sort(p.rows.begin(), p.rows.end(), lex_less);
  return p;
}

bool close(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return a.size() == 0 || (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool close(const Polyhedron& a, const Polyhedron& b, double tol) {
  if (a.dimension != b.dimension || a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (!close(a.rows[i].a, b.rows[i].a, tol)) return false;
    if (std::abs(a.rows[i].b - b.rows[i].b) > tol) return false;
  }
  return true;
}

bool close(const AffineMap& a, const AffineMap& b, double tol) {
  return close(a.matrix, b.matrix, tol) && close(a.offset, b.offset, tol);
}

}  // namespace

std::vector<std::string> validate_automaton(const HybridAutomaton& a) {
  std::vector<std::string> out;
  const std::size_t n = a.dimension();
  if (n == 0) out.push_back("variables: at least one variable is required");
  std::set<std::string> names;
  for (const auto& v : a.variables.names) {
    if (!names.insert(v).second) out.push_back("variables: duplicate variable \"" + v + "\"");
  }
  if (a.convergence_set.empty()) out.push_back("convergence_set: must be nonempty");
  for (const auto& v : a.convergence_set) {
    if (!names.count(v)) {
      out.push_back("convergence_set: unknown variable \"" + v + "\"");
    }
  }

  std::set<std::string> mode_ids;
  for (const auto& m : a.modes) {
    const std::string owner = "mode \"" + m.id + "\"";
    if (!mode_ids.insert(m.id).second) out.push_back(owner + ": duplicate mode id");
    if (!valid_identifier(m.id)) out.push_back(owner + ": invalid identifier");
    if (m.flow.vertices.empty()) out.push_back(owner + ": flow has no vertices");
    for (const auto& f : m.flow.vertices) check_map(f, n, owner + " flow", &out);
    check_polyhedron(m.invariant, n, owner + " invariant", &out);
    std::set<std::string> conv(m.converging_vars.begin(), m.converging_vars.end());
    for (const auto& v : m.converging_vars) {
      if (!names.count(v)) out.push_back(owner + ": unknown converging variable \"" + v + "\"");
    }
    for (const auto& v : a.convergence_set) {
      if (!conv.count(v)) {
        out.push_back(owner + ": converging_vars misses convergence variable \"" + v + "\"");
      }
    }
  }

  std::set<std::string> transition_ids;
  for (const auto& t : a.transitions) {
    const std::string owner = "transition \"" + t.id + "\"";
    if (!transition_ids.insert(t.id).second) out.push_back(owner + ": duplicate transition id");
    if (!valid_identifier(t.id)) out.push_back(owner + ": invalid identifier");
    if (!mode_ids.count(t.source)) {
      out.push_back(owner + ": unknown source mode \"" + t.source + "\"");
    }
    if (!mode_ids.count(t.target)) {
      out.push_back(owner + ": unknown target mode \"" + t.target + "\"");
    }
    check_polyhedron(t.guard, n, owner + " guard", &out);
    check_map(t.update, n, owner + " update", &out);
  }
  return out;
}

HybridAutomaton shift_equilibrium(const HybridAutomaton& a, const Eigen::VectorXd& point) {
  if (static_cast<std::size_t>(point.size()) != a.dimension()) {
    throw std::invalid_argument("shift_equilibrium: point has dimension " +
                                std::to_string(point.size()) + ", automaton has " +
                                std::to_string(a.dimension()));
  }
  HybridAutomaton out = a;
  for (auto& m : out.modes) {
    for (auto& f : m.flow.vertices) f.offset = f.matrix * point + f.offset;
    m.invariant = shift_polyhedron(m.invariant, point);
  }
  for (auto& t : out.transitions) {
    t.guard = shift_polyhedron(t.guard, point);
    t.update.offset = t.update.matrix * point + t.update.offset - point;
  }
  return out;
}

HybridAutomaton canonicalize(const HybridAutomaton& a) {
  HybridAutomaton out = a;
  auto by_id = [](const auto& l, const auto& r) { return l.id < r.id; };
  std::stable_sort(out.modes.begin(), out.modes.end(), by_id);
  std::stable_sort(out.transitions.begin(), out.transitions.end(), by_id);
  for (auto& m : out.modes) {
    m.invariant = canonical_polyhedron(m.invariant);
    std::set<std::string> conv(m.converging_vars.begin(), m.converging_vars.end());
    m.converging_vars.clear();
    for (const auto& v : out.variables.names) {
      if (conv.count(v)) m.converging_vars.push_back(v);
    }
  }
  for (auto& t : out.transitions) t.guard = canonical_polyhedron(t.guard);
  std::set<std::string> conv(out.convergence_set.begin(), out.convergence_set.end());
  out.convergence_set.clear();
  for (const auto& v : out.variables.names) {
    if (conv.count(v)) out.convergence_set.push_back(v);
  }
  return out;
}

bool approx_equal(const HybridAutomaton& lhs, const HybridAutomaton& rhs, double tol) {
  if (lhs.variables != rhs.variables || lhs.convergence_set != rhs.convergence_set) return false;
  if (lhs.modes.size() != rhs.modes.size() || lhs.transitions.size() != rhs.transitions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < lhs.modes.size(); ++i) {
    const Mode& a = lhs.modes[i];
    const Mode& b = rhs.modes[i];
    if (a.id != b.id || a.converging_vars != b.converging_vars) return false;
    if (a.flow.vertices.size() != b.flow.vertices.size()) return false;
    for (std::size_t k = 0; k < a.flow.vertices.size(); ++k) {
      if (!close(a.flow.vertices[k], b.flow.vertices[k], tol)) return false;
    }
    if (!close(a.invariant, b.invariant, tol)) return false;
  }
  for (std::size_t i = 0; i < lhs.transitions.size(); ++i) {
    const Transition& a = lhs.transitions[i];
    const Transition& b = rhs.transitions[i];
    if (a.id != b.id || a.source != b.source || a.target != b.target) return false;
    if (!close(a.guard, b.guard, tol) || !close(a.update, b.update, tol)) return false;
  }
  return true;
}

Digraph underlying_digraph(const HybridAutomaton& a) {
  Digraph g;
  for (const auto& m : a.modes) g.add_vertex(m.id);
  for (const auto& t : a.transitions) g.add_edge(t.source, t.target);
  return g;
}

}  // namespace lyapdecomp
