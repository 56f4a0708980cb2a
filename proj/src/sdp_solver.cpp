#include "lyapdecomp/sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <random>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "interior_point.hpp"

namespace lyapdecomp {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

Eigen::VectorXd to_vector(const SDPProblem& p, const Assignment& a) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.unknowns.size()));
  for (std::size_t i = 0; i < p.unknowns.size(); ++i) {
    auto it = a.find(p.unknowns[i].id);
    if (it != a.end()) v(static_cast<Eigen::Index>(i)) = it->second;
  }
  return v;
}

Assignment to_assignment(const SDPProblem& p, const Eigen::VectorXd& v) {
  Assignment a;
  for (std::size_t i = 0; i < p.unknowns.size(); ++i) {
    a[p.unknowns[i].id] = v(static_cast<Eigen::Index>(i));
  }
  return a;
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

bool accepts(const SDPProblem& p, const Assignment& values, double tol, std::string* why) {
  for (const auto& u : p.unknowns) {
    auto it = values.find(u.id);
    if (it == values.end()) {
      if (why) *why = "unassigned unknown " + u.id;
      return false;
    }
    if (u.nonnegative && !(it->second >= 0.0)) {
      if (why) *why = "negative value for " + u.id;
      return false;
    }
  }
  for (const auto& lmi : p.constraints) {
    const double e = min_eigenvalue(lmi.strengthened().evaluate(values));
    if (!(e >= -tol)) {
      if (why) *why = lmi.name + " has minimum eigenvalue " + sci(e);
      return false;
    }
  }
  return true;
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// The problem in vectorized form: blocks F_j(y) = c_j + sum_u y_u A_ju,
// stacked column-major. `scaled` divides each block by its largest
// coefficient and each unknown by its column norm.
constexpr int kPolishPasses = 8;

class Operator {
 public:
  Operator(const SDPProblem& p, ExecPolicy policy) : policy_(policy) {
    const auto m = static_cast<Eigen::Index>(p.unknowns.size());
    std::vector<Eigen::Index> sizes;
    for (const auto& lmi : p.constraints) sizes.push_back(lmi.size());
    layout_ = std::make_unique<BlockLayout>(sizes);
    const Eigen::Index total = layout_->total();

    nonneg_.resize(m);
    for (Eigen::Index u = 0; u < m; ++u) nonneg_[u] = p.unknowns[u].nonnegative;

    std::map<std::string, Eigen::Index> index;
    for (Eigen::Index u = 0; u < m; ++u) index[p.unknowns[u].id] = u;

    c0_.resize(total);
    c_.resize(total);
    Eigen::VectorXd col_norm2 = Eigen::VectorXd::Zero(m);
    terms_.resize(p.constraints.size());
    for (std::size_t j = 0; j < p.constraints.size(); ++j) {
      const AffineSymMatrix f = p.constraints[j].strengthened();
      const Eigen::Index d = f.size();
      const Eigen::Index off = layout_->offsets[j];
      double biggest = 0.0;
      for (const auto& [id, a] : f.terms) {
        biggest = std::max(biggest, a.cwiseAbs().maxCoeff());
        terms_[j].emplace_back(index.at(id), a);
      }
      if (biggest == 0.0) biggest = std::max(1.0, f.constant.cwiseAbs().maxCoeff());
      const double w = 1.0 / biggest;
      row_scale_.push_back(w);
      Eigen::Map<Eigen::MatrixXd>(c0_.data() + off, d, d) = f.constant;
      Eigen::Map<Eigen::MatrixXd>(c_.data() + off, d, d) = w * f.constant;
      for (const auto& [u, a] : terms_[j]) col_norm2(u) += w * w * a.squaredNorm();
    }
    scale_ = Eigen::VectorXd::Ones(m);
    for (Eigen::Index u = 0; u < m; ++u) {
      if (col_norm2(u) > 0.0) scale_(u) = 1.0 / std::sqrt(col_norm2(u));
    }

    std::vector<Eigen::Triplet<double>> raw;
    std::vector<Eigen::Triplet<double>> scaled;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const Eigen::Index d = layout_->sizes[j];
      const Eigen::Index off = layout_->offsets[j];
      for (const auto& [u, a] : terms_[j]) {
        for (Eigen::Index col = 0; col < d; ++col) {
          for (Eigen::Index row = 0; row < d; ++row) {
            const double v = a(row, col);
            if (v == 0.0) continue;
            raw.emplace_back(off + col * d + row, u, v);
            scaled.emplace_back(off + col * d + row, u, row_scale_[j] * v * scale_(u));
          }
        }
      }
    }
    A0_.resize(total, m);
    A0_.setFromTriplets(raw.begin(), raw.end());
    A_.resize(total, m);
    A_.setFromTriplets(scaled.begin(), scaled.end());
    SparseMatrix normal = SparseMatrix(A_.transpose()) * A_;
    SparseMatrix eye(m, m);
    eye.setIdentity();
    normal += eye;
    ldlt_.compute(normal);
  }

  Eigen::Index unknowns() const { return A_.cols(); }
  std::size_t blocks() const { return terms_.size(); }
  const BlockLayout& layout() const { return *layout_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  const std::vector<char>& nonneg() const { return nonneg_; }

  // Nearest point of the affine set to (y0, s0), scaled coordinates.
  void project_affine(const Eigen::VectorXd& y0, const Eigen::VectorXd& s0, Eigen::VectorXd* y,
                      Eigen::VectorXd* s) const {
    const Eigen::VectorXd rhs = y0 + A_.transpose() * (s0 - c_);
    *y = ldlt_.solve(rhs);
    *s = c_ + A_ * *y;
  }

  Eigen::VectorXd slack(const Eigen::VectorXd& y) const { return c_ + A_ * y; }

  double project_cone(Eigen::VectorXd* y, Eigen::VectorXd* s) const {
    double worst = project_psd_blocks(*layout_, s, policy_);
    for (Eigen::Index u = 0; u < y->size(); ++u) {
      if (nonneg_[u] && (*y)(u) < 0.0) {
        worst = std::max(worst, -(*y)(u));
        (*y)(u) = 0.0;
      }
    }
    return worst;
  }

  // Largest scaled violation of the cone at an affine point.
  double violation(const Eigen::VectorXd& y, const Eigen::VectorXd& s) const {
    const Eigen::VectorXd e = block_min_eigenvalues(*layout_, s, policy_);
    double worst = e.size() > 0 ? std::max(0.0, -e.minCoeff()) : 0.0;
    for (Eigen::Index u = 0; u < y.size(); ++u) {
      if (nonneg_[u]) worst = std::max(worst, -y(u));
    }
    return worst;
  }

  Eigen::VectorXd unscale(const Eigen::VectorXd& yhat) const {
    Eigen::VectorXd y = yhat.cwiseProduct(scale_);
    for (Eigen::Index u = 0; u < y.size(); ++u) {
      if (nonneg_[u] && y(u) < 0.0) y(u) = 0.0;
    }
    return y;
  }

  Eigen::VectorXd rescale(const Eigen::VectorXd& y) const { return y.cwiseQuotient(scale_); }

  // max t_weight t + dir'y  s.t.  F_j(y) - t I >= 0, y_u - t >= 0 for
  // sign-constrained u, t <= cap, |y_u| <= box, all scaled. t is unknown m.
  detail::DualSdp margin_form(double t_weight, const Eigen::VectorXd& dir, double cap,
                              double box) const {
    const Eigen::Index m = unknowns();
    detail::DualSdp sdp;
    sdp.unknowns = m + 1;
    sdp.b = Eigen::VectorXd::Zero(m + 1);
    sdp.b.head(m) = dir;
    sdp.b(m) = t_weight;
    auto scalar = [](double v) { return Eigen::MatrixXd::Constant(1, 1, v); };
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const Eigen::Index d = layout_->sizes[j];
      detail::DualBlock blk;
      blk.c = Eigen::Map<const Eigen::MatrixXd>(c_.data() + layout_->offsets[j], d, d);
      blk.c = 0.5 * (blk.c + blk.c.transpose());
      for (const auto& [u, a] : terms_[j]) {
        blk.a.emplace_back(u, -row_scale_[j] * scale_(u) * 0.5 * (a + a.transpose()));
      }
      blk.a.emplace_back(m, Eigen::MatrixXd::Identity(d, d));
      sdp.blocks.push_back(std::move(blk));
    }
    for (Eigen::Index u = 0; u < m; ++u) {
      if (nonneg_[u]) sdp.blocks.push_back({scalar(0.0), {{u, scalar(-1.0)}, {m, scalar(1.0)}}});
      sdp.blocks.push_back({scalar(box), {{u, scalar(1.0)}}});
      sdp.blocks.push_back({scalar(box), {{u, scalar(-1.0)}}});
    }
    sdp.blocks.push_back({scalar(cap), {{m, scalar(1.0)}}});
    return sdp;
  }

  // Zero scaled unknowns and a margin t strictly below every block.
  Eigen::VectorXd margin_start(double cap) const {
    const Eigen::Index m = unknowns();
    double lo = std::min(0.0, cap);
    const Eigen::VectorXd e = block_min_eigenvalues(*layout_, c_, policy_);
    if (e.size() > 0) lo = std::min(lo, e.minCoeff());
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m + 1);
    y(m) = lo - 1.0;
    return y;
  }

  // Unscaled acceptance: sign constraints exact, blocks within tol.
  bool accept(const Eigen::VectorXd& y, double tol) const {
    for (Eigen::Index u = 0; u < y.size(); ++u) {
      if (nonneg_[u] && !(y(u) >= 0.0)) return false;
    }
    const Eigen::VectorXd s = c0_ + A0_ * y;
    const Eigen::VectorXd e = block_min_eigenvalues(*layout_, s, policy_);
    return e.size() == 0 || e.minCoeff() >= -tol;
  }

  // Moves y by the least-norm step that makes every nearly singular
  // eigendirection of every block exactly singular. Nearly zero
  // sign-constrained unknowns are pinned to zero and eliminated, as is any
  // free one the step would drive negative.
  Eigen::VectorXd polish(const Eigen::VectorXd& y, double threshold) const {
    const Eigen::VectorXd s = c0_ + A0_ * y;
    const Eigen::Index m = y.size();
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const Eigen::Index d = layout_->sizes[j];
      Eigen::Map<const Eigen::MatrixXd> f(s.data() + layout_->offsets[j], d, d);
      const Eigen::MatrixXd sym = 0.5 * (f + f.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
      const double tol = threshold * std::max(1.0, sym.cwiseAbs().maxCoeff());
      for (Eigen::Index k = 0; k < d; ++k) {
        if (es.eigenvalues()(k) >= tol) break;
        const Eigen::VectorXd z = es.eigenvectors().col(k);
        const Eigen::VectorXd fz = sym * z;
        for (Eigen::Index r = 0; r < d; ++r) {
          Eigen::VectorXd row = Eigen::VectorXd::Zero(m);
          for (const auto& [u, a] : terms_[j]) row(u) += a.row(r).dot(z);
          rows.push_back(std::move(row));
          rhs.push_back(-fz(r));
        }
      }
    }
    // Compared in scaled units, where every unknown moves its blocks alike.
    const Eigen::VectorXd yhat = rescale(y);
    const double ymax = std::max(1.0, yhat.cwiseAbs().maxCoeff());
    std::vector<char> pinned(m, 0);
    bool any_pinned = false;
    for (Eigen::Index u = 0; u < m; ++u) {
      if (nonneg_[u] && yhat(u) < threshold * ymax) pinned[u] = any_pinned = 1;
    }
    if (rows.empty() && !any_pinned) return y;

    Eigen::VectorXd out = y;
    for (int pass = 0; pass < kPolishPasses; ++pass) {
      Eigen::VectorXd fixed = Eigen::VectorXd::Zero(m);
      for (Eigen::Index u = 0; u < m; ++u) {
        if (pinned[u]) fixed(u) = -y(u);
      }
      // Only free unknowns touched by some equation can move.
      std::vector<Eigen::Index> cols;
      for (Eigen::Index u = 0; u < m; ++u) {
        if (pinned[u]) continue;
        for (const auto& r : rows) {
          if (r(u) != 0.0) {
            cols.push_back(u);
            break;
          }
        }
      }
      Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
      Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t k = 0; k < cols.size(); ++k) M(ii, static_cast<Eigen::Index>(k)) = rows[i](cols[k]);
        b(ii) = rhs[i] - rows[i].dot(fixed);
      }
      out = y + fixed;
      if (M.rows() > 0 && M.cols() > 0) {
        const Eigen::VectorXd step = M.completeOrthogonalDecomposition().solve(b);
        for (std::size_t k = 0; k < cols.size(); ++k) out(cols[k]) += step(static_cast<Eigen::Index>(k));
      }
      for (Eigen::Index u = 0; u < m; ++u) {
        if (pinned[u]) out(u) = 0.0;
      }
      bool grew = false;
      for (Eigen::Index u = 0; u < m; ++u) {
        if (nonneg_[u] && out(u) < 0.0) pinned[u] = grew = true;
      }
      if (!grew) break;
    }
    for (Eigen::Index u = 0; u < m; ++u) {
      if (nonneg_[u] && out(u) < 0.0) out(u) = 0.0;
    }
    return out;
  }

 private:
  ExecPolicy policy_;
  std::unique_ptr<BlockLayout> layout_;
  std::vector<char> nonneg_;
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::MatrixXd>>> terms_;
  Eigen::VectorXd c0_;
  Eigen::VectorXd c_;
  Eigen::VectorXd scale_;
  std::vector<double> row_scale_;
  SparseMatrix A0_;
  SparseMatrix A_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
};

constexpr double kPolishThresholds[] = {1e-5, 1e-6, 1e-7, 1e-4};
constexpr double kPolishTrigger = 1e-3;

bool try_polish(const Operator& op, const Eigen::VectorXd& y, double accept,
                Eigen::VectorXd* out) {
  for (double t : kPolishThresholds) {
    Eigen::VectorXd z = y;
    for (int round = 0; round < 3; ++round) {
      z = op.polish(z, t);
      if (op.accept(z, accept)) {
        *out = z;
        return true;
      }
    }
  }
  return false;
}

SolveResult run_projections(const SDPProblem& p, const Eigen::VectorXd& start,
                            const SolverOptions& opts) {
  SolveResult result;
  const Operator op(p, opts.policy);
  const Eigen::Index m = op.unknowns();
  const Eigen::Index total = op.layout().total();

  // Start on the affine set at the target itself.
  Eigen::VectorXd x_y = op.rescale(start);
  Eigen::VectorXd x_s = op.slack(x_y);
  Eigen::VectorXd q_y = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd q_s = Eigen::VectorXd::Zero(total);
  Eigen::VectorXd a_y, a_s;
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd q_half_y, q_half_s;
  double best_at_half = std::numeric_limits<double>::infinity();
  const int half = opts.max_iterations / 2;

  auto finish_feasible = [&](const Eigen::VectorXd& y, int it) {
    result.status = SolveStatus::kFeasible;
    result.assignment = to_assignment(p, y);
    result.iterations = it;
    result.violation = 0.0;
    return result;
  };

  if (p.constraints.empty()) return finish_feasible(op.unscale(x_y), 0);

  for (int it = 1; it <= opts.max_iterations; ++it) {
    op.project_affine(x_y, x_s, &a_y, &a_s);
    Eigen::VectorXd b_y = a_y + q_y;
    Eigen::VectorXd b_s = a_s + q_s;
    op.project_cone(&b_y, &b_s);
    q_y += a_y - b_y;
    q_s += a_s - b_s;
    const double gap = std::max((a_y - b_y).cwiseAbs().maxCoeff(),
                                total > 0 ? (a_s - b_s).cwiseAbs().maxCoeff() : 0.0);
    x_y = std::move(b_y);
    x_s = std::move(b_s);
    if (it == half) {
      q_half_y = q_y;
      q_half_s = q_s;
      best_at_half = best;
    }

    const bool converged = gap < opts.tolerance;
    if (it % opts.check_every == 0 || converged || it == opts.max_iterations) {
      const double v = op.violation(a_y, a_s);
      best = std::min(best, v);
      const Eigen::VectorXd y = op.unscale(a_y);
      if (op.accept(y, opts.accept_eig)) return finish_feasible(y, it);
      const bool polish_now = v < kPolishTrigger && (converged || it % (10 * opts.check_every) == 0);
      Eigen::VectorXd polished;
      if (polish_now && try_polish(op, y, opts.accept_eig, &polished)) {
        return finish_feasible(polished, it);
      }
      if (converged) {
        // The projection has settled without an acceptable point.
        result.iterations = it;
        break;
      }
    }
    result.iterations = it;
  }

  result.violation = best;
  // Without a feasible point the corrections grow by the gap vector every
  // iteration while the violation stays put.
  double slope = 0.0;
  if (q_half_y.size() == q_y.size() && result.iterations > half) {
    slope = std::sqrt((q_y - q_half_y).squaredNorm() + (q_s - q_half_s).squaredNorm()) /
            static_cast<double>(result.iterations - half);
  }
  const bool stalled = best >= 0.9 * best_at_half && slope >= 0.5 * best;
  if (result.iterations >= opts.max_iterations && best > opts.infeasible_violation && stalled) {
    result.status = SolveStatus::kInfeasible;
    result.message = "no feasible point: violation stalled at " + sci(best) +
                     " while the correction grew by " + sci(slope) + " per iteration";
  } else {
    result.status = SolveStatus::kInconclusive;
    result.message = "stopped after " + std::to_string(result.iterations) +
                     " iterations with best violation " + sci(best);
  }
  return result;
}

// Box on the scaled unknowns. The margin grows with the scale of y, so a
// large box drives the iterates out to it and ruins the conditioning.
constexpr double kMarginBox = 1e2;
// Box for confirming an infeasibility found within kMarginBox.
constexpr double kConfirmBox = 1e5;
constexpr double kMarginCap = 1.0;
// Margin from which polishing is attempted, scaled units.
constexpr double kPolishMargin = 1e-6;
// Weight of the margin against a unit direction; large enough that the
// optimum keeps the margin at zero on every problem seen so far.
constexpr double kDirectionalMarginWeight = 1e4;

SolveResult feasible_result(const SDPProblem& p, const Eigen::VectorXd& y, int iterations) {
  SolveResult r;
  r.status = SolveStatus::kFeasible;
  r.assignment = to_assignment(p, y);
  r.iterations = iterations;
  return r;
}

// Maximizes the common margin t of all blocks within a box. Feasible as soon
// as an iterate (or its polish) is accepted; infeasible when the primal
// bound on the margin drops below -infeasible_violation.
SolveResult run_margin(const SDPProblem& p, const Operator& op, double box,
                       const SolverOptions& opts) {
  const Eigen::Index m = op.unknowns();
  const detail::DualSdp sdp = op.margin_form(1.0, Eigen::VectorXd::Zero(m), kMarginCap, box);
  Eigen::VectorXd found;
  auto stop = [&](const Eigen::VectorXd& yt) {
    if (yt(m) < -kPolishMargin) return false;
    const Eigen::VectorXd y = op.unscale(yt.head(m));
    if (op.accept(y, opts.accept_eig)) {
      found = y;
      return true;
    }
    return try_polish(op, y, opts.accept_eig, &found);
  };
  const detail::IpmResult r = detail::solve_dual_sdp(sdp, op.margin_start(kMarginCap),
                                                     opts.ipm_iterations, opts.policy, stop);
  if (r.stopped) return feasible_result(p, found, r.iterations);
  SolveResult out;
  out.iterations = r.iterations;
  out.violation = std::max(0.0, -r.y(m));
  const bool bounded = r.primal_residual < 1e-7;
  if (bounded && r.primal_objective < -opts.infeasible_violation) {
    out.status = SolveStatus::kInfeasible;
    out.message = "no feasible point: the common margin of all constraints is at most " +
                  sci(r.primal_objective);
  } else {
    out.message = "stopped after " + std::to_string(r.iterations) +
                  " interior-point iterations with margin " + sci(r.y(m)) +
                  " and margin bound " + sci(r.primal_objective);
  }
  return out;
}

SolveResult run_interior_point(const SDPProblem& p, const SolverOptions& opts) {
  const Operator op(p, opts.policy);
  if (p.constraints.empty()) return feasible_result(p, Eigen::VectorXd::Zero(op.unknowns()), 0);
  SolveResult r = run_margin(p, op, kMarginBox, opts);
  if (r.status != SolveStatus::kInfeasible) return r;
  SolveResult wide = run_margin(p, op, kConfirmBox, opts);
  wide.iterations += r.iterations;
  if (wide.status == SolveStatus::kInconclusive) {
    wide.message = r.message + " within the default box; in a wider box " + wide.message;
  }
  return wide;
}

// A feasible point far along `dir`: maximizes a heavily weighted margin
// capped at zero plus dir'y. The last accepted iterate stands in when the
// optimum itself cannot be polished.
SolveResult run_directional(const SDPProblem& p, const Eigen::VectorXd& dir,
                            const SolverOptions& opts) {
  const Operator op(p, opts.policy);
  const Eigen::Index m = op.unknowns();
  if (p.constraints.empty()) return feasible_result(p, Eigen::VectorXd::Zero(m), 0);
  Eigen::VectorXd d = dir.cwiseProduct(op.scale());
  if (d.norm() > 0.0) d.normalize();
  const detail::DualSdp sdp = op.margin_form(kDirectionalMarginWeight, d, 0.0, kMarginBox);
  Eigen::VectorXd last;
  auto watch = [&](const Eigen::VectorXd& yt) {
    if (yt(m) >= -kPolishMargin) {
      const Eigen::VectorXd y = op.unscale(yt.head(m));
      if (op.accept(y, opts.accept_eig)) last = y;
    }
    return false;
  };
  const detail::IpmResult r =
      detail::solve_dual_sdp(sdp, op.margin_start(0.0), opts.ipm_iterations, opts.policy, watch);
  const Eigen::VectorXd y = op.unscale(r.y.head(m));
  Eigen::VectorXd polished;
  if (op.accept(y, opts.accept_eig)) return feasible_result(p, y, r.iterations);
  if (try_polish(op, y, opts.accept_eig, &polished)) return feasible_result(p, polished, r.iterations);
  if (last.size() == m) return feasible_result(p, last, r.iterations);
  SolveResult out;
  out.iterations = r.iterations;
  out.violation = std::max(0.0, -r.y(m));
  out.message = "no accepted point along the direction";
  return out;
}

}  // namespace

namespace {

// Smallest t in (0, 1] with t·y still accepted. Acceptance is monotone in t:
// F(t y) = t F(y) + (1 - t) F0, and F0 is negative semidefinite for every
// block except the upper bound, which only improves as t shrinks.
Eigen::VectorXd shrink(const SDPProblem& p, const Eigen::VectorXd& y, double tol) {
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (accepts(p, to_assignment(p, mid * y), tol)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi * y;
}

}  // namespace

SolveResult solve_feasibility(const SDPProblem& p, std::uint64_t seed, const SolverOptions& opts) {
  SolveResult r;
  if (opts.method == SolverMethod::kInteriorPoint) {
    r = run_interior_point(p, opts);
  } else {
    Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.unknowns.size()));
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> normal(0.0, 1e-3);
      for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = normal(rng);
    }
    r = run_projections(p, start, opts);
  }
  if (r.status == SolveStatus::kFeasible) {
    r.assignment = to_assignment(p, shrink(p, to_vector(p, r.assignment), opts.accept_eig));
  }
  return r;
}

SolveResult solve_projection(const SDPProblem& p, const Eigen::VectorXd& target,
                             const SolverOptions& opts) {
  if (target.size() != static_cast<Eigen::Index>(p.unknowns.size())) {
    throw std::invalid_argument("solve_projection: target has the wrong size");
  }
  return run_projections(p, target, opts);
}

SolveResult solve_directional(const SDPProblem& p, const Eigen::VectorXd& dir,
                              const SolverOptions& opts) {
  if (dir.size() != static_cast<Eigen::Index>(p.unknowns.size())) {
    throw std::invalid_argument("solve_directional: direction has the wrong size");
  }
  return run_directional(p, dir, opts);
}


CandidateSet extract_candidate_llfs(const SDPProblem& p, std::size_t k, std::uint64_t seed,
                                    const SolverOptions& opts) {
  if (k == 0) throw std::invalid_argument("extract_candidate_llfs: k must be positive");
  const SolveResult first = solve_feasibility(p, seed, opts);
  if (first.status != SolveStatus::kFeasible) {
    throw InfeasibleProblem(first.status, std::string("candidate extraction: problem is ") +
                                              to_string(first.status) + "; " + first.message);
  }
  const Eigen::VectorXd base = to_vector(p, first.assignment);
  const Eigen::Index m = base.size();
  CandidateSet out;
  std::vector<Eigen::VectorXd> kept;
  auto keep = [&](const Eigen::VectorXd& v) {
    for (const auto& w : kept) {
      const double scale = std::max({v.norm(), w.norm(), 1e-12});
      if ((v - w).norm() / scale < 1e-6) return;
    }
    kept.push_back(v);
    out.candidates.push_back(to_assignment(p, v));
  };
  keep(base);

  Eigen::VectorXd trace = to_vector(p, p.trace_functional);
  const bool has_trace = trace.norm() > 0.0;
  if (has_trace) trace.normalize();
  const double rho = 10.0 * (1.0 + base.norm());
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t i = 1; i < k; ++i) {
    Eigen::VectorXd dir(m);
    if (i == 1 && has_trace) {
      dir = -trace;
    } else if (i == 2 && has_trace) {
      dir = trace;
    } else {
      for (Eigen::Index j = 0; j < m; ++j) dir(j) = normal(rng);
      if (dir.norm() == 0.0) continue;
      dir.normalize();
    }
    const SolveResult r = opts.method == SolverMethod::kInteriorPoint
                              ? solve_directional(p, dir, opts)
                              : solve_projection(p, base + rho * dir, opts);
    if (r.status != SolveStatus::kFeasible) continue;
    keep(shrink(p, to_vector(p, r.assignment), opts.accept_eig));
  }
  return out;
}

}  // namespace lyapdecomp
