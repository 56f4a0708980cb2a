#include "lyapdecomp/model_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lyapdecomp {

using nlohmann::json;

ModelError::ModelError(Kind kind, std::string message, std::size_t line, std::size_t column,
                       std::vector<std::string> violations)
    : std::runtime_error(std::move(message)),
      kind_(kind),
      line_(line),
      column_(column),
      violations_(std::move(violations)) {}

namespace {

[[noreturn]] void semantic(const std::string& message) {
  throw ModelError(ModelError::Kind::kSemantic, message);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional = {}) {
  if (!obj.is_object()) semantic(where + ": expected an object");
  std::set<std::string> known;
  for (const char* k : required) {
    known.insert(k);
    if (!obj.contains(k)) semantic(where + ": missing required field \"" + k + "\"");
  }
  for (const char* k : optional) known.insert(k);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) semantic(where + ": unknown field \"" + it.key() + "\"");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) semantic(where + ": expected a number");
  return j.get<double>();
}

std::string string_value(const json& j, const std::string& where) {
  if (!j.is_string()) semantic(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> string_list(const json& j, const std::string& where) {
  if (!j.is_array()) semantic(where + ": expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(string_value(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Eigen::VectorXd vector_value(const json& j, const std::string& where) {
  if (!j.is_array()) semantic(where + ": expected a list of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Eigen::MatrixXd matrix_value(const json& j, const std::string& where) {
  if (!j.is_array()) semantic(where + ": expected a list of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array()) semantic(where + "[" + std::to_string(i) + "]: expected a row");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) semantic(where + ": rows have different lengths");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number(j[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
  }
  return m;
}

AffineMap map_value(const json& j, const std::string& where) {
  expect_keys(j, where, {"matrix", "offset"});
  return {matrix_value(j["matrix"], where + ".matrix"), vector_value(j["offset"], where + ".offset")};
}

Polyhedron polyhedron_value(const json& j, const std::string& where, std::size_t n) {
  expect_keys(j, where, {"rows"});
  const json& rows = j["rows"];
  if (!rows.is_array()) semantic(where + ".rows: expected a list");
  Polyhedron p = Polyhedron::universe(n);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string w = where + ".rows[" + std::to_string(i) + "]";
    expect_keys(rows[i], w, {"a", "b"});
    p.add_row(vector_value(rows[i]["a"], w + ".a"), number(rows[i]["b"], w + ".b"));
  }
  return p;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

json map_json(const AffineMap& f) {
  json out = json::object();
  out["matrix"] = matrix_json(f.matrix);
  out["offset"] = vector_json(f.offset);
  return out;
}

json polyhedron_json(const Polyhedron& p) {
  json rows = json::array();
  for (const auto& r : p.rows) {
    json row = json::object();
    row["a"] = vector_json(r.a);
    row["b"] = r.b;
    rows.push_back(row);
  }
  json out = json::object();
  out["rows"] = rows;
  return out;
}

void position_of(std::string_view text, std::size_t byte, std::size_t* line, std::size_t* col) {
  *line = 1;
  *col = 1;
  const std::size_t end = std::min(byte, text.size());
  for (std::size_t i = 0; i + 1 < end; ++i) {
    if (text[i] == '\n') {
      ++*line;
      *col = 1;
    } else {
      ++*col;
    }
  }
}

}  // namespace

HybridAutomaton parse_model(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 0;
    std::size_t col = 0;
    position_of(text, e.byte, &line, &col);
    throw ModelError(ModelError::Kind::kSyntax,
                     "syntax error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }

  expect_keys(root, "model", {"variables", "convergence_set", "modes", "transitions"});
  HybridAutomaton a;
  a.variables.names = string_list(root["variables"], "variables");
  a.convergence_set = string_list(root["convergence_set"], "convergence_set");
  const std::size_t n = a.variables.dimension();

  const json& modes = root["modes"];
  if (!modes.is_array()) semantic("modes: expected a list");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const std::string w = "modes[" + std::to_string(i) + "]";
    expect_keys(modes[i], w, {"id", "flow", "invariant"}, {"converging_vars"});
    Mode m;
    m.id = string_value(modes[i]["id"], w + ".id");
    const json& flow = modes[i]["flow"];
    expect_keys(flow, w + ".flow", {"vertices"});
    if (!flow["vertices"].is_array()) semantic(w + ".flow.vertices: expected a list");
    for (std::size_t k = 0; k < flow["vertices"].size(); ++k) {
      m.flow.vertices.push_back(
          map_value(flow["vertices"][k], w + ".flow.vertices[" + std::to_string(k) + "]"));
    }
    m.invariant = polyhedron_value(modes[i]["invariant"], w + ".invariant", n);
    m.converging_vars = modes[i].contains("converging_vars")
                            ? string_list(modes[i]["converging_vars"], w + ".converging_vars")
                            : a.variables.names;
    a.modes.push_back(std::move(m));
  }

  const json& transitions = root["transitions"];
  if (!transitions.is_array()) semantic("transitions: expected a list");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string w = "transitions[" + std::to_string(i) + "]";
    expect_keys(transitions[i], w, {"id", "source", "target", "guard", "update"});
    Transition t;
    t.id = string_value(transitions[i]["id"], w + ".id");
    t.source = string_value(transitions[i]["source"], w + ".source");
    t.target = string_value(transitions[i]["target"], w + ".target");
    t.guard = polyhedron_value(transitions[i]["guard"], w + ".guard", n);
    t.update = map_value(transitions[i]["update"], w + ".update");
    a.transitions.push_back(std::move(t));
  }

  auto violations = validate_automaton(a);
  if (!violations.empty()) {
    std::string msg = "invalid automaton:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ModelError(ModelError::Kind::kSemantic, msg, 0, 0, violations);
  }
  return a;
}

std::string serialize_model(const HybridAutomaton& input) {
  const HybridAutomaton a = canonicalize(input);
  json root = json::object();
  root["variables"] = a.variables.names;
  root["convergence_set"] = a.convergence_set;
  json modes = json::array();
  for (const auto& m : a.modes) {
    json jm = json::object();
    jm["id"] = m.id;
    json vertices = json::array();
    for (const auto& f : m.flow.vertices) vertices.push_back(map_json(f));
    jm["flow"] = json::object({{"vertices", vertices}});
    jm["invariant"] = polyhedron_json(m.invariant);
    if (m.converging_vars != a.variables.names) jm["converging_vars"] = m.converging_vars;
    modes.push_back(jm);
  }
  root["modes"] = modes;
  json transitions = json::array();
  for (const auto& t : a.transitions) {
    json jt = json::object();
    jt["id"] = t.id;
    jt["source"] = t.source;
    jt["target"] = t.target;
    jt["guard"] = polyhedron_json(t.guard);
    jt["update"] = map_json(t.update);
    transitions.push_back(jt);
  }
  root["transitions"] = transitions;
  return root.dump(2) + "\n";
}

HybridAutomaton load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError(ModelError::Kind::kSyntax, "cannot open model file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

void save_model_file(const HybridAutomaton& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file \"" + path + "\"");
  out << serialize_model(a);
}

}  // namespace lyapdecomp
