#include "lyapdecomp/lmi.hpp"

#include <set>

namespace lyapdecomp {

void AffineSymMatrix::add_term(const std::string& id, const Eigen::MatrixXd& coefficient) {
  auto it = terms.find(id);
  if (it == terms.end()) {
    terms.emplace(id, coefficient);
  } else {
    it->second += coefficient;
  }
}

AffineSymMatrix& AffineSymMatrix::operator+=(const AffineSymMatrix& other) {
  constant += other.constant;
  for (const auto& [id, m] : other.terms) add_term(id, m);
  return *this;
}

AffineSymMatrix& AffineSymMatrix::operator-=(const AffineSymMatrix& other) {
  constant -= other.constant;
  for (const auto& [id, m] : other.terms) add_term(id, -m);
  return *this;
}

AffineSymMatrix AffineSymMatrix::operator*(double s) const {
  AffineSymMatrix out(constant * s);
  for (const auto& [id, m] : terms) out.terms.emplace(id, m * s);
  return out;
}

AffineSymMatrix AffineSymMatrix::congruence(const Eigen::MatrixXd& T) const {
  AffineSymMatrix out(T.transpose() * constant * T);
  for (const auto& [id, m] : terms) out.terms.emplace(id, T.transpose() * m * T);
  return out;
}

AffineSymMatrix AffineSymMatrix::lyapunov(const Eigen::MatrixXd& T) const {
  AffineSymMatrix out(constant * T + T.transpose() * constant);
  for (const auto& [id, m] : terms) out.terms.emplace(id, m * T + T.transpose() * m);
  return out;
}

Eigen::MatrixXd AffineSymMatrix::evaluate(const Assignment& values) const {
  Eigen::MatrixXd out = constant;
  for (const auto& [id, m] : terms) {
    auto it = values.find(id);
    if (it == values.end()) throw UnassignedUnknown(id);
    out += it->second * m;
  }
  return out;
}

AffineSymMatrix LinearMatrixInequality::strengthened() const {
  AffineSymMatrix out = form;
  if (strengthening.size() > 0) out.constant -= strengthening;
  return out;
}

void SDPProblem::declare(const Unknown& u) {
  if (const Unknown* existing = find(u.id)) {
    if (existing->nonnegative != u.nonnegative) {
      throw std::invalid_argument("unknown \"" + u.id + "\" declared with conflicting signs");
    }
    return;
  }
  unknowns.push_back(u);
}

const Unknown* SDPProblem::find(const std::string& id) const {
  for (const auto& u : unknowns) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

std::size_t SDPProblem::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    if (unknowns[i].id == id) return i;
  }
  throw std::out_of_range("undeclared unknown \"" + id + "\"");
}

void SDPProblem::append(const SDPProblem& other) {
  for (const auto& u : other.unknowns) declare(u);
  constraints.insert(constraints.end(), other.constraints.begin(), other.constraints.end());
  for (const auto& [id, v] : other.objective) objective[id] += v;
  for (const auto& [id, v] : other.trace_functional) trace_functional[id] += v;
}

std::vector<std::string> check_problem(const SDPProblem& p) {
  std::vector<std::string> out;
  std::set<std::string> declared;
  for (const auto& u : p.unknowns) {
    if (!declared.insert(u.id).second) out.push_back("duplicate unknown \"" + u.id + "\"");
  }
  auto symmetric = [](const Eigen::MatrixXd& m) {
    return m.rows() == m.cols() && (m.size() == 0 || (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  };
  for (const auto& lmi : p.constraints) {
    const Eigen::Index n = lmi.form.size();
    if (!symmetric(lmi.form.constant)) out.push_back(lmi.name + ": constant block is not symmetric");
    if (lmi.strengthening.size() > 0 &&
        (lmi.strengthening.rows() != n || lmi.strengthening.cols() != n)) {
      out.push_back(lmi.name + ": strengthening block has the wrong size");
    }
    for (const auto& [id, m] : lmi.form.terms) {
      if (!declared.count(id)) out.push_back(lmi.name + ": undeclared unknown \"" + id + "\"");
      if (m.rows() != n || m.cols() != n) {
        out.push_back(lmi.name + ": coefficient of \"" + id + "\" has the wrong size");
      } else if (!symmetric(m)) {
        out.push_back(lmi.name + ": coefficient of \"" + id + "\" is not symmetric");
      }
    }
  }
  for (const auto& [id, v] : p.objective) {
    if (!declared.count(id)) out.push_back("objective: undeclared unknown \"" + id + "\"");
  }
  return out;
}

}  // namespace lyapdecomp
