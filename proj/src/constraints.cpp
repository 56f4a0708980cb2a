#include "lyapdecomp/constraints.hpp"

#include <algorithm>
#include <stdexcept>

#include "lyapdecomp/linprog.hpp"

namespace lyapdecomp {

namespace {

Eigen::MatrixXd unit_sym(Eigen::Index size, Eigen::Index i, Eigen::Index j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(size, size);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

Eigen::MatrixXd sym_outer(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return 0.5 * (u * v.transpose() + v * u.transpose());
}

}  // namespace

QuadraticTemplate QuadraticTemplate::fresh(const std::string& id, std::size_t n,
                                           const std::vector<std::size_t>& active) {
  const auto size = static_cast<Eigen::Index>(n + 1);
  QuadraticTemplate t{id, n, active, AffineSymMatrix::zero(size), {}};
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a; b < active.size(); ++b) {
      const std::string u = p_entry_id(id, active[a], active[b]);
      t.matrix.add_term(u, unit_sym(size, static_cast<Eigen::Index>(active[a]),
                                    static_cast<Eigen::Index>(active[b])));
      t.unknowns.push_back({u, false});
    }
  }
  return t;
}

QuadraticTemplate QuadraticTemplate::conical(const std::string& id, std::size_t n,
                                             const std::vector<std::size_t>& active,
                                             const std::string& region,
                                             const std::vector<Eigen::MatrixXd>& candidates) {
  const auto size = static_cast<Eigen::Index>(n + 1);
  QuadraticTemplate t{id, n, active, AffineSymMatrix::zero(size), {}};
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].rows() != size || candidates[k].cols() != size) {
      throw std::invalid_argument("conical template \"" + id + "\": candidate has wrong size");
    }
    const std::string u = conic_coefficient_id(region, k);
    t.matrix.add_term(u, candidates[k]);
    t.unknowns.push_back({u, true});
  }
  return t;
}

Eigen::MatrixXd QuadraticTemplate::projector() const {
  const auto size = static_cast<Eigen::Index>(dimension + 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t i : active) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
  return d;
}

std::vector<std::size_t> active_indices(const HybridAutomaton& a, const Mode& mode) {
  std::vector<std::size_t> out;
  for (const auto& v : mode.converging_vars) {
    if (auto i = a.variables.index_of(v)) out.push_back(*i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string p_entry_id(const std::string& tpl, std::size_t i, std::size_t j) {
  return "P[" + tpl + "](" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string conic_coefficient_id(const std::string& region, std::size_t k) {
  return "c[" + region + "](" + std::to_string(k) + ")";
}

std::string multiplier_id(const std::string& lmi, std::size_t i, std::size_t j) {
  return "lam[" + lmi + "](" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::string lower_lmi_name(const std::string& tpl) { return "lower[" + tpl + "]"; }
std::string upper_lmi_name(const std::string& tpl) { return "upper[" + tpl + "]"; }

std::string decrease_lmi_name(const std::string& tpl, std::size_t vertex) {
  return "decrease[" + tpl + "](" + std::to_string(vertex) + ")";
}

std::string jump_lmi_name(const std::string& transition, const std::string& src_tpl,
                          const std::string& dst_tpl) {
  return "jump[" + transition + "|" + src_tpl + ">" + dst_tpl + "]";
}

std::string conic_lmi_name(const std::string& region) { return "conic[" + region + "]"; }

Eigen::MatrixXd homogenized_drift(const AffineMap& f) {
  const Eigen::Index n = f.offset.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = f.matrix;
  m.topRightCorner(n, 1) = f.offset;
  return m;
}

Eigen::MatrixXd homogenized_update(const AffineMap& f) {
  Eigen::MatrixXd m = homogenized_drift(f);
  m(m.rows() - 1, m.cols() - 1) = 1.0;
  return m;
}

std::optional<LiftedLmi> s_procedure_lift(const std::string& name, const AffineSymMatrix& core,
                                          const Polyhedron& domain) {
  if (is_empty(domain)) return std::nullopt;
  const Eigen::Index size = core.size();
  if (static_cast<Eigen::Index>(domain.dimension) + 1 != size) {
    throw std::invalid_argument(name + ": domain dimension does not match the form");
  }
  LiftedLmi out{{name, core, {}}, {}};
  // rho[0] is the constant 1; rho[i] encodes b_i - a_i·x >= 0.
  std::vector<Eigen::VectorXd> rho;
  Eigen::VectorXd one = Eigen::VectorXd::Zero(size);
  one(size - 1) = 1.0;
  rho.push_back(one);
  for (const auto& r : domain.rows) {
    Eigen::VectorXd v(size);
    v.head(size - 1) = -r.a;
    v(size - 1) = r.b;
    rho.push_back(v);
  }
  for (std::size_t i = 0; i < rho.size(); ++i) {
    for (std::size_t j = std::max<std::size_t>(i, 1); j < rho.size(); ++j) {
      const std::string id = multiplier_id(name, i, j);
      out.lmi.form.add_term(id, -sym_outer(rho[i], rho[j]));
      out.multipliers.push_back({id, true});
    }
  }
  return out;
}

std::vector<LiftedLmi> generate_mode_constraints(const Mode& m, const QuadraticTemplate& t,
                                                 const GenerationOptions& opts) {
  std::vector<LiftedLmi> out;
  const Eigen::MatrixXd d = t.projector();
  const Eigen::MatrixXd gap = opts.gap * d;
  const auto& k = opts.class_k;

  AffineSymMatrix lower = t.matrix;
  lower.constant -= k.eps_pos * d;
  auto lo = s_procedure_lift(lower_lmi_name(t.id), lower, m.invariant);
  if (!lo) return out;
  lo->lmi.strengthening = gap;
  out.push_back(std::move(*lo));

  AffineSymMatrix upper = t.matrix * -1.0;
  upper.constant += k.m_up * d;
  auto up = s_procedure_lift(upper_lmi_name(t.id), upper, m.invariant);
  up->lmi.strengthening = gap;
  out.push_back(std::move(*up));

  for (std::size_t v = 0; v < m.flow.vertices.size(); ++v) {
    AffineSymMatrix decrease = t.matrix.lyapunov(homogenized_drift(m.flow.vertices[v])) * -1.0;
    decrease.constant -= k.eps_dec * d;
    auto dec = s_procedure_lift(decrease_lmi_name(t.id, v), decrease, m.invariant);
    dec->lmi.strengthening = gap;
    out.push_back(std::move(*dec));
  }
  return out;
}

std::optional<LiftedLmi> generate_transition_constraint(const Transition& tr,
                                                        const QuadraticTemplate& src,
                                                        const QuadraticTemplate& dst) {
  if (src.dimension != dst.dimension) {
    throw std::invalid_argument("transition \"" + tr.id + "\": templates differ in dimension");
  }
  AffineSymMatrix core = src.matrix - dst.matrix.congruence(homogenized_update(tr.update));
  return s_procedure_lift(jump_lmi_name(tr.id, src.id, dst.id), core, tr.guard);
}

LiftedLmi conic_constraint(const std::string& region, std::size_t count) {
  LiftedLmi out{{conic_lmi_name(region), AffineSymMatrix(Eigen::MatrixXd::Constant(1, 1, -1.0)), {}},
                {}};
  for (std::size_t k = 0; k < count; ++k) {
    const std::string id = conic_coefficient_id(region, k);
    out.lmi.form.add_term(id, Eigen::MatrixXd::Ones(1, 1));
    out.multipliers.push_back({id, true});
  }
  return out;
}

SDPProblem assemble_sdp(const Fragment& f, const GenerationOptions& opts) {
  SDPProblem p;
  for (const auto& [id, t] : f.templates) {
    for (const auto& u : t.unknowns) p.declare(u);
    for (const auto& [u, m] : t.matrix.terms) p.trace_functional[u] += m.trace();
  }
  std::vector<LiftedLmi> lifted;
  auto tpl = [&](const std::string& id) -> const QuadraticTemplate& {
    auto it = f.templates.find(id);
    if (it == f.templates.end()) throw std::invalid_argument("fragment: undeclared template \"" + id + "\"");
    return it->second;
  };
  for (const auto& item : f.modes) {
    for (auto& l : generate_mode_constraints(item.mode, tpl(item.tpl), opts)) {
      lifted.push_back(std::move(l));
    }
  }
  for (const auto& item : f.jumps) {
    if (auto l = generate_transition_constraint(item.transition, tpl(item.src_tpl), tpl(item.dst_tpl))) {
      lifted.push_back(std::move(*l));
    }
  }
  for (const auto& item : f.conics) lifted.push_back(conic_constraint(item.region, item.count));
  for (auto& l : lifted) {
    for (const auto& u : l.multipliers) p.declare(u);
    p.constraints.push_back(std::move(l.lmi));
  }
  return p;
}

}  // namespace lyapdecomp
