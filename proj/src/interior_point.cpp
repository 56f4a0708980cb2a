#include "interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lyapdecomp::detail {

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

constexpr double kStepFraction = 0.95;
constexpr double kConvergedGap = 1e-10;
constexpr double kConvergedResidual = 1e-9;
constexpr double kStallStep = 1e-6;
constexpr int kStallLimit = 3;

Eigen::MatrixXd slack(const DualBlock& blk, const Eigen::VectorXd& y) {
  Eigen::MatrixXd s = blk.c;
  for (const auto& [i, a] : blk.a) s -= y(i) * a;
  return s;
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

// Largest alpha with x + alpha dx still PSD, infinity when unbounded.
double max_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& dx) {
  if (x.rows() == 1) {
    return dx(0, 0) < 0.0 ? -x(0, 0) / dx(0, 0) : std::numeric_limits<double>::infinity();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd w = llt.matrixL().solve(dx);
  w = llt.matrixL().solve(w.transpose()).transpose();
  const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (w + w.transpose()),
                                                                    Eigen::EigenvaluesOnly)
                        .eigenvalues()(0);
  return lo < 0.0 ? -1.0 / lo : std::numeric_limits<double>::infinity();
}

// Cholesky factor of the Schur complement with a diagonal shift that grows
// until it factors, followed by refinement against the unshifted matrix.
// The shift only matters along directions the data barely determine.
class Schur {
 public:
  explicit Schur(const Eigen::MatrixXd& m) : m_(m) {
    const double top = std::max(m.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    double shift = kSchurShift;
    for (int attempt = 0; attempt < 12; ++attempt, shift *= 100.0) {
      Eigen::MatrixXd shifted = m;
      shifted.diagonal().array() += shift * (m.diagonal().array().abs() + 1e-6 * top);
      llt_.compute(shifted);
      if (llt_.info() == Eigen::Success) return;
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = llt_.solve(rhs);
    for (int k = 0; k < kRefinements; ++k) x += llt_.solve(rhs - m_ * x);
    return x;
  }

 private:
  static constexpr double kSchurShift = 1e-12;
  static constexpr int kRefinements = 2;
  const Eigen::MatrixXd& m_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

class Solver {
 public:
  Solver(const DualSdp& sdp, ExecPolicy policy) : sdp_(sdp), policy_(policy) {
    for (const auto& blk : sdp_.blocks) n_ += static_cast<double>(blk.c.rows());
  }

  Eigen::VectorXd apply(const Blocks& x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(sdp_.unknowns);
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (const auto& [i, a] : sdp_.blocks[k].a) out(i) += inner(a, x[k]);
    }
    return out;
  }

  // Cholesky-factors every slack block; false when one is not positive
  // definite.
  bool factor_slack(const Eigen::VectorXd& y, Blocks* z, Blocks* zinv) const {
    const auto nb = static_cast<long>(sdp_.blocks.size());
    z->resize(sdp_.blocks.size());
    zinv->resize(sdp_.blocks.size());
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok) if (policy_ == ExecPolicy::kParallel)
    for (long k = 0; k < nb; ++k) {
      (*z)[k] = slack(sdp_.blocks[k], y);
      Eigen::LLT<Eigen::MatrixXd> llt((*z)[k]);
      if (llt.info() != Eigen::Success) {
        ok = false;
        continue;
      }
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity((*z)[k].rows(), (*z)[k].rows());
      (*zinv)[k] = llt.solve(id);
    }
    return ok;
  }

  // HKM Schur complement M_ij = tr(A_i X A_j Z^-1). Per-block pieces are
  // summed in block order so the result does not depend on threads.
  Eigen::MatrixXd schur(const Blocks& x, const Blocks& zinv) const {
    const auto nb = static_cast<long>(sdp_.blocks.size());
    std::vector<Eigen::MatrixXd> pieces(sdp_.blocks.size());
#pragma omp parallel for schedule(dynamic, 16) if (policy_ == ExecPolicy::kParallel)
    for (long k = 0; k < nb; ++k) {
      const auto& a = sdp_.blocks[k].a;
      const auto kk = static_cast<Eigen::Index>(a.size());
      Eigen::MatrixXd piece(kk, kk);
      for (Eigen::Index p = 0; p < kk; ++p) {
        const Eigen::MatrixXd g = x[k] * a[p].second * zinv[k];
        for (Eigen::Index q = p; q < kk; ++q) {
          piece(p, q) = piece(q, p) = inner(a[q].second, g);
        }
      }
      pieces[k] = std::move(piece);
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(sdp_.unknowns, sdp_.unknowns);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const auto& a = sdp_.blocks[k].a;
      for (std::size_t p = 0; p < a.size(); ++p) {
        for (std::size_t q = 0; q < a.size(); ++q) {
          m(a[p].first, a[q].first) += pieces[k](static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q));
        }
      }
    }
    return m;
  }

  struct Direction {
    Eigen::VectorXd dy;
    Blocks dx;
    Blocks dz;
  };

  // Newton direction for A(dX) = rp, dZ = -A'(dy), dX Z + X dZ = r.
  template <class Factor>
  Direction direction(const Factor& factor, const Eigen::VectorXd& rp, const Blocks& x,
                      const Blocks& zinv, const Blocks& r) const {
    Blocks rz(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) rz[k] = r[k] * zinv[k];
    Direction d;
    d.dy = factor.solve(rp - apply(rz));
    d.dx.resize(r.size());
    d.dz.resize(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
      Eigen::MatrixXd dz = Eigen::MatrixXd::Zero(x[k].rows(), x[k].cols());
      for (const auto& [i, a] : sdp_.blocks[k].a) dz -= d.dy(i) * a;
      const Eigen::MatrixXd dx = rz[k] - x[k] * dz * zinv[k];
      d.dx[k] = 0.5 * (dx + dx.transpose());
      d.dz[k] = std::move(dz);
    }
    return d;
  }

  double step(const Blocks& v, const Blocks& dv) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.size(); ++k) alpha = std::min(alpha, max_step(v[k], dv[k]));
    return alpha;
  }

  double n() const { return n_; }

 private:
  const DualSdp& sdp_;
  ExecPolicy policy_;
  double n_ = 0.0;
};

double total_inner(const Blocks& a, const Blocks& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += inner(a[k], b[k]);
  return s;
}

}  // namespace

IpmResult solve_dual_sdp(const DualSdp& sdp, const Eigen::VectorXd& y0, int max_iterations,
                         ExecPolicy policy,
                         const std::function<bool(const Eigen::VectorXd&)>& stop) {
  const Solver solver(sdp, policy);
  IpmResult out;
  out.y = y0;
  Blocks z, zinv;
  if (!solver.factor_slack(out.y, &z, &zinv)) return out;

  const double xi = std::max(10.0, std::sqrt(solver.n()));
  Blocks x(sdp.blocks.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = xi * Eigen::MatrixXd::Identity(sdp.blocks[k].c.rows(), sdp.blocks[k].c.rows());
  }
  const double bnorm = 1.0 + sdp.b.norm();
  int stalled = 0;

  for (int it = 1; it <= max_iterations; ++it) {
    out.iterations = it;
    const Eigen::VectorXd rp = sdp.b - solver.apply(x);
    double pobj = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) pobj += inner(sdp.blocks[k].c, x[k]);
    const double dobj = sdp.b.dot(out.y);
    const double gap = total_inner(x, z);
    out.primal_objective = pobj;
    out.dual_objective = dobj;
    out.primal_residual = rp.norm() / bnorm;
    if (out.primal_residual < kConvergedResidual &&
        gap < kConvergedGap * (1.0 + std::abs(pobj) + std::abs(dobj))) {
      out.converged = true;
      return out;
    }
    const double mu = gap / solver.n();

    const Eigen::MatrixXd m = solver.schur(x, zinv);
    const Schur factor(m);
    auto solve_dir = [&](const Blocks& r) { return solver.direction(factor, rp, x, zinv, r); };

    Blocks r(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) r[k] = -x[k] * z[k];
    const auto pred = solve_dir(r);
    const double ap = std::min(1.0, solver.step(x, pred.dx));
    const double ad = std::min(1.0, solver.step(z, pred.dz));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      mu_aff += inner(x[k] + ap * pred.dx[k], z[k] + ad * pred.dz[k]);
    }
    mu_aff /= solver.n();
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto d = x[k].rows();
      r[k] = sigma * mu * Eigen::MatrixXd::Identity(d, d) - x[k] * z[k] - pred.dx[k] * pred.dz[k];
    }
    const auto corr = solve_dir(r);
    const double alpha_p = std::min(1.0, kStepFraction * solver.step(x, corr.dx));
    double alpha_d = std::min(1.0, kStepFraction * solver.step(z, corr.dz));
    stalled = alpha_p < kStallStep && alpha_d < kStallStep ? stalled + 1 : 0;
    if (stalled >= kStallLimit) return out;

    for (std::size_t k = 0; k < x.size(); ++k) x[k] += alpha_p * corr.dx[k];
    Eigen::VectorXd y_next = out.y + alpha_d * corr.dy;
    Blocks z_next, zinv_next;
    int tries = 0;
    while (!solver.factor_slack(y_next, &z_next, &zinv_next)) {
      if (++tries > 40) return out;
      alpha_d *= 0.7;
      y_next = out.y + alpha_d * corr.dy;
    }
    out.y = std::move(y_next);
    z = std::move(z_next);
    zinv = std::move(zinv_next);
    if (stop && stop(out.y)) {
      out.stopped = true;
      return out;
    }
  }
  return out;
}

}  // namespace lyapdecomp::detail
