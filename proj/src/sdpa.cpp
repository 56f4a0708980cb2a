#include "lyapdecomp/sdpa.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace lyapdecomp {

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

std::string export_sdpa(const SDPProblem& p) {
  std::map<std::string, std::size_t> matno;
  for (std::size_t i = 0; i < p.unknowns.size(); ++i) matno[p.unknowns[i].id] = i + 1;

  std::vector<std::size_t> nonneg;
  for (std::size_t i = 0; i < p.unknowns.size(); ++i) {
    if (p.unknowns[i].nonnegative) nonneg.push_back(i + 1);
  }

  // (matno, blkno, i, j) -> value
  std::map<std::tuple<std::size_t, std::size_t, Eigen::Index, Eigen::Index>, double> entries;
  auto put = [&](std::size_t mat, std::size_t blk, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = i; j < m.cols(); ++j) {
        if (m(i, j) != 0.0) entries[{mat, blk, i + 1, j + 1}] += m(i, j);
      }
    }
  };
  for (std::size_t b = 0; b < p.constraints.size(); ++b) {
    const AffineSymMatrix f = p.constraints[b].strengthened();
    put(0, b + 1, -f.constant);
    for (const auto& [id, m] : f.terms) put(matno.at(id), b + 1, m);
  }
  const std::size_t sign_block = p.constraints.size() + 1;
  for (std::size_t k = 0; k < nonneg.size(); ++k) {
    const auto pos = static_cast<Eigen::Index>(k + 1);
    entries[{nonneg[k], sign_block, pos, pos}] = 1.0;
  }

  std::string out;
  out += std::to_string(p.unknowns.size()) + "\n";
  out += std::to_string(p.constraints.size() + (nonneg.empty() ? 0 : 1)) + "\n";
  std::string structure;
  for (const auto& lmi : p.constraints) {
    if (!structure.empty()) structure += ' ';
    structure += std::to_string(lmi.size());
  }
  if (!nonneg.empty()) {
    if (!structure.empty()) structure += ' ';
    structure += "-" + std::to_string(nonneg.size());
  }
  out += structure + "\n";
  std::string objective;
  for (const auto& u : p.unknowns) {
    if (!objective.empty()) objective += ' ';
    auto it = p.objective.find(u.id);
    objective += number(it == p.objective.end() ? 0.0 : it->second);
  }
  out += objective + "\n";
  for (const auto& [key, value] : entries) {
    if (value == 0.0) continue;
    const auto& [mat, blk, i, j] = key;
    out += std::to_string(mat) + " " + std::to_string(blk) + " " + std::to_string(i) + " " +
           std::to_string(j) + " " + number(value) + "\n";
  }
  return out;
}

void write_sdpa_file(const SDPProblem& p, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SDPA file \"" + path + "\"");
  out << export_sdpa(p);
}

}  // namespace lyapdecomp
