#include "lyapdecomp/fixtures.hpp"

#include <array>
#include <stdexcept>

namespace lyapdecomp {

namespace {

constexpr double kKnBound = 10.0;
constexpr double kCamBound = 50.0;
constexpr double kCamCenter = 3.0;
constexpr double kCamGain = 0.2;
constexpr double kCamSpeed = 0.6;

Mode stable_1d(const std::string& id) {
  Mode m;
  m.id = id;
  m.flow.vertices.push_back({Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::VectorXd::Zero(1)});
  m.invariant = Polyhedron::box(Eigen::VectorXd::Constant(1, -kKnBound),
                                Eigen::VectorXd::Constant(1, kKnBound));
  m.converging_vars = {"x"};
  return m;
}

Transition transition_1d(const std::string& id, const std::string& from, const std::string& to,
                         double lo, double hi, double gain) {
  return {id, from, to,
          Polyhedron::box(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)),
          {Eigen::MatrixXd::Constant(1, 1, gain), Eigen::VectorXd::Zero(1)}};
}

HybridAutomaton one_variable() {
  HybridAutomaton a;
  a.variables.names = {"x"};
  a.convergence_set = {"x"};
  return a;
}

}  // namespace

HybridAutomaton generate_kn_fixture(std::size_t n) {
  if (n < 1 || n > 8) throw std::invalid_argument("K_n fixture needs 1 <= n <= 8");
  HybridAutomaton a = one_variable();
  for (std::size_t i = 1; i <= n; ++i) a.modes.push_back(stable_1d("m" + std::to_string(i)));
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      if (i == j) continue;
      const std::string s = std::to_string(i), t = std::to_string(j);
      a.transitions.push_back(
          transition_1d("t_" + s + "_" + t, "m" + s, "m" + t, -kKnBound, kKnBound, 1.0));
    }
  }
  return a;
}

HybridAutomaton generate_spidercam_fixture() {
  HybridAutomaton a;
  a.variables.names = {"x", "y"};
  a.convergence_set = {"x", "y"};
  // Per axis: -1 below the center band, 0 inside it, +1 above it.
  struct Sector {
    const char* id;
    int sx;
    int sy;
  };
  // Ring order; the center comes first.
  const std::array<Sector, 9> sectors{{{"center", 0, 0},
                                       {"east", 1, 0},
                                       {"ne", 1, 1},
                                       {"north", 0, 1},
                                       {"nw", -1, 1},
                                       {"west", -1, 0},
                                       {"sw", -1, -1},
                                       {"south", 0, -1},
                                       {"se", 1, -1}}};
  auto range = [](int s) -> std::array<double, 2> {
    if (s < 0) return {-kCamBound, -kCamCenter};
    if (s > 0) return {kCamCenter, kCamBound};
    return {-kCamCenter, kCamCenter};
  };
  auto box_of = [&](const Sector& s) {
    const auto rx = range(s.sx), ry = range(s.sy);
    return Polyhedron::box(Eigen::Vector2d(rx[0], ry[0]), Eigen::Vector2d(rx[1], ry[1]));
  };
  for (const auto& s : sectors) {
    Mode m;
    m.id = s.id;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(2);
    const std::array<int, 2> dir{s.sx, s.sy};
    for (int k = 0; k < 2; ++k) {
      if (dir[k] == 0) {
        A(k, k) = -kCamGain;
      } else {
        b(k) = -kCamSpeed * dir[k];
      }
    }
    m.flow.vertices.push_back({A, b});
    m.invariant = box_of(s);
    m.converging_vars = {"x", "y"};
    a.modes.push_back(std::move(m));
  }
  auto join = [&](const Sector& p, const Sector& q) {
    const Polyhedron guard = box_of(p).intersect(box_of(q));
    for (const auto& [from, to] : {std::pair{p, q}, std::pair{q, p}}) {
      a.transitions.push_back({std::string(from.id) + "_to_" + to.id, from.id, to.id, guard,
                               AffineMap::identity(2)});
    }
  };
  for (std::size_t i = 1; i < sectors.size(); ++i) {
    join(sectors[0], sectors[i]);
    join(sectors[i], sectors[i == sectors.size() - 1 ? 1 : i + 1]);
  }
  return a;
}

Digraph generate_acc_skeleton() {
  Digraph g;
  for (int i = 1; i <= 6; ++i) g.add_vertex("v" + std::to_string(i));
  for (int i = 1; i < 6; ++i) {
    g.add_edge("v" + std::to_string(i), "v" + std::to_string(i + 1));
    g.add_edge("v" + std::to_string(i + 1), "v" + std::to_string(i));
  }
  g.add_edge("v6", "v1");
  return g;
}

HybridAutomaton automaton_from_digraph(const Digraph& g) {
  HybridAutomaton a = one_variable();
  for (const auto& v : g.vertices()) a.modes.push_back(stable_1d(v));
  for (const auto& [u, v] : g.edges()) {
    a.transitions.push_back(transition_1d(u + "_to_" + v, u, v, -kKnBound, kKnBound, 1.0));
  }
  return a;
}

HybridAutomaton generate_overlap_fixture() {
  HybridAutomaton a = one_variable();
  for (const char* id : {"S", "H", "L"}) a.modes.push_back(stable_1d(id));
  a.transitions.push_back(transition_1d("t_sh", "S", "H", 1.0, 2.0, 2.0));
  a.transitions.push_back(transition_1d("t_hl", "H", "L", 1.0, 3.0, 1.0));
  a.transitions.push_back(transition_1d("t_ll", "L", "L", 1.0, 2.0, 1.0));
  return a;
}

HybridAutomaton generate_scalar_fixture(double rate) {
  HybridAutomaton a = one_variable();
  Mode m;
  m.id = "m1";
  m.flow.vertices.push_back({Eigen::MatrixXd::Constant(1, 1, rate), Eigen::VectorXd::Zero(1)});
  m.invariant = Polyhedron::universe(1);
  m.converging_vars = {"x"};
  a.modes.push_back(std::move(m));
  return a;
}

HybridAutomaton generate_rotation_fixture() {
  HybridAutomaton a;
  a.variables.names = {"x", "y"};
  a.convergence_set = {"x", "y"};
  Mode m;
  m.id = "m1";
  Eigen::MatrixXd A(2, 2);
  A << -1.0, 1.0, -1.0, -1.0;
  m.flow.vertices.push_back({A, Eigen::VectorXd::Zero(2)});
  m.invariant = Polyhedron::universe(2);
  m.converging_vars = {"x", "y"};
  a.modes.push_back(std::move(m));
  return a;
}

HybridAutomaton fixture_by_name(const std::string& name) {
  if (name.size() == 2 && name[0] == 'k' && name[1] >= '1' && name[1] <= '8') {
    return generate_kn_fixture(static_cast<std::size_t>(name[1] - '0'));
  }
  if (name == "spidercam") return generate_spidercam_fixture();
  if (name == "acc") return automaton_from_digraph(generate_acc_skeleton());
  if (name == "overlap") return generate_overlap_fixture();
  if (name == "unstable") return generate_scalar_fixture(1.0);
  if (name == "stable1d") return generate_scalar_fixture(-1.0);
  if (name == "rotation") return generate_rotation_fixture();
  throw std::invalid_argument("unknown fixture \"" + name + "\"");
}

}  // namespace lyapdecomp
