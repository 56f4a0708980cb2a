#include "lyapdecomp/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "lyapdecomp/linprog.hpp"

namespace lyapdecomp {

const char* to_string(SamplingStatus s) {
  switch (s) {
    case SamplingStatus::kPass:
      return "pass";
    case SamplingStatus::kFail:
      return "fail";
    case SamplingStatus::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

ExactCheckResult check_certificate_exact(const SDPProblem& problem,
                                         const QuadraticCertificate& cert, double tol_eig) {
  ExactCheckResult out;
  for (const auto& u : problem.unknowns) {
    auto it = cert.values.find(u.id);
    if (it == cert.values.end()) throw UnassignedUnknown(u.id);
    if (u.nonnegative && !(it->second >= 0.0)) {
      out.pass = false;
      out.failed = u.id;
      std::ostringstream s;
      s << "sign-constrained unknown " << u.id << " = " << it->second;
      out.details = s.str();
      return out;
    }
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& lmi : problem.constraints) {
    const double e = min_eigenvalue(lmi.form.evaluate(cert.values));
    worst = std::min(worst, e);
    if (!(e >= -tol_eig) && out.pass) {
      out.pass = false;
      out.failed = lmi.name;
      std::ostringstream s;
      s << lmi.name << " has minimum eigenvalue " << e << " < -" << tol_eig;
      out.details = s.str();
    }
  }
  out.min_eigenvalue = problem.constraints.empty() ? 0.0 : worst;
  return out;
}

double evaluate_quadratic(const Eigen::MatrixXd& P, const Eigen::VectorXd& x) {
  Eigen::VectorXd z(x.size() + 1);
  z.head(x.size()) = x;
  z(x.size()) = 1.0;
  return z.dot(P * z);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a counter-based stream.
class SlotRng {
 public:
  explicit SlotRng(std::uint64_t key) : state_(key) {}
  double uniform() {
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace

std::vector<Eigen::VectorXd> sample_polyhedron(const Polyhedron& p, std::size_t n,
                                               std::uint64_t seed, std::uint64_t stream,
                                               double box, std::size_t max_rejections,
                                               ExecPolicy policy) {
  if (is_empty(p)) return {};
  const BoundingBox bb = bounding_box(p);
  const auto dim = static_cast<Eigen::Index>(p.dimension);
  Eigen::VectorXd lo(dim), hi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (bb.lower_finite(i) && bb.upper_finite(i)) {
      lo(i) = bb.lower(i);
      hi(i) = bb.upper(i);
    } else if (bb.lower_finite(i)) {
      lo(i) = bb.lower(i);
      hi(i) = bb.lower(i) + 2.0 * box;
    } else if (bb.upper_finite(i)) {
      lo(i) = bb.upper(i) - 2.0 * box;
      hi(i) = bb.upper(i);
    } else {
      lo(i) = -box;
      hi(i) = box;
    }
  }
  std::vector<std::optional<Eigen::VectorXd>> slots(n);
  const std::uint64_t base = splitmix64(seed ^ splitmix64(stream + 0x5bd1e995ULL));
  auto draw = [&](std::size_t i) {
    SlotRng rng(splitmix64(base + i));
    Eigen::VectorXd x(dim);
    for (std::size_t attempt = 0; attempt < max_rejections; ++attempt) {
      for (Eigen::Index k = 0; k < dim; ++k) x(k) = lo(k) + (hi(k) - lo(k)) * rng.uniform();
      if (p.contains(x, 1e-9)) {
        slots[i] = x;
        return;
      }
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) draw(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < count; ++i) draw(static_cast<std::size_t>(i));
  }
  std::vector<Eigen::VectorXd> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

namespace {

struct Violation {
  double amount = 0.0;
  std::string condition;
};

double relative(double lhs, double rhs) {
  return (lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

double masked_norm2(const Eigen::VectorXd& x, const std::vector<std::size_t>& active) {
  double s = 0.0;
  for (std::size_t i : active) s += x(static_cast<Eigen::Index>(i)) * x(static_cast<Eigen::Index>(i));
  return s;
}

// First slot (in order) whose check exceeds tol; identical under both
// policies because every slot is evaluated independently.
template <typename Check>
std::optional<std::size_t> first_failure(const std::vector<Eigen::VectorXd>& points, double tol,
                                         ExecPolicy policy, Check check,
                                         std::vector<Violation>* found) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  found->assign(points.size(), Violation{});
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) (*found)[i] = check(points[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) (*found)[i] = check(points[i]);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((*found)[i].amount > tol) return i;
  }
  return std::nullopt;
}

}  // namespace

SamplingResult check_certificate_sampling(const HybridAutomaton& a,
                                          const QuadraticCertificate& cert,
                                          const SamplingOptions& opts) {
  SamplingResult out;
  const auto& k = cert.class_k;
  std::uint64_t stream = 0;
  std::vector<Violation> found;

  auto fail = [&](const std::string& element, const Eigen::VectorXd& x, const Violation& v) {
    out.status = SamplingStatus::kFail;
    out.element = element;
    out.condition = v.condition;
    out.witness = x;
    out.violation = v.amount;
    std::ostringstream s;
    s << element << ": " << v.condition << " violated by " << v.amount << " at ["
      << x.transpose() << "]";
    out.details = s.str();
    return out;
  };
  auto inconclusive = [&](const std::string& element) {
    out.status = SamplingStatus::kInconclusive;
    out.element = element;
    out.details = element + ": no sample points could be drawn";
    return out;
  };

  for (const auto& m : a.modes) {
    ++stream;
    if (is_empty(m.invariant)) continue;
    auto it = cert.templates.find(m.id);
    if (it == cert.templates.end()) {
      out.status = SamplingStatus::kFail;
      out.element = m.id;
      out.condition = "missing template";
      out.details = "mode " + m.id + " has no template in the certificate";
      return out;
    }
    const Eigen::MatrixXd& P = it->second;
    const auto active = active_indices(a, m);
    const auto points = sample_polyhedron(m.invariant, opts.samples, opts.seed, stream, opts.box,
                                          opts.max_rejections, opts.policy);
    if (points.empty()) return inconclusive(m.id);
    out.points_checked += points.size();
    auto check = [&](const Eigen::VectorXd& x) {
      const double v = evaluate_quadratic(P, x);
      const double r2 = masked_norm2(x, active);
      Violation worst{relative(k.eps_pos * r2, v), "lower"};
      const double up = relative(v, k.m_up * r2);
      if (up > worst.amount) worst = {up, "upper"};
      Eigen::VectorXd z(x.size() + 1);
      z.head(x.size()) = x;
      z(x.size()) = 1.0;
      const Eigen::VectorXd grad = 2.0 * (P * z).head(x.size());
      for (std::size_t f = 0; f < m.flow.vertices.size(); ++f) {
        const double vdot = grad.dot(m.flow.vertices[f].apply(x));
        const double dec = relative(vdot, -k.eps_dec * r2);
        if (dec > worst.amount) worst = {dec, "decrease(" + std::to_string(f) + ")"};
      }
      return worst;
    };
    if (auto i = first_failure(points, opts.tol_sem, opts.policy, check, &found)) {
      return fail(m.id, points[*i], found[*i]);
    }
  }

  for (const auto& t : a.transitions) {
    ++stream;
    if (is_empty(t.guard)) continue;
    auto src = cert.templates.find(t.source);
    auto dst = cert.templates.find(t.target);
    if (src == cert.templates.end() || dst == cert.templates.end()) {
      out.status = SamplingStatus::kFail;
      out.element = t.id;
      out.condition = "missing template";
      out.details = "transition " + t.id + " has an endpoint without template";
      return out;
    }
    const auto points = sample_polyhedron(t.guard, opts.samples, opts.seed, stream, opts.box,
                                          opts.max_rejections, opts.policy);
    if (points.empty()) return inconclusive(t.id);
    out.points_checked += points.size();
    auto check = [&](const Eigen::VectorXd& x) {
      return Violation{relative(evaluate_quadratic(dst->second, t.update.apply(x)),
                                evaluate_quadratic(src->second, x)),
                       "jump"};
    };
    if (auto i = first_failure(points, opts.tol_sem, opts.policy, check, &found)) {
      return fail(t.id, points[*i], found[*i]);
    }
  }
  out.status = SamplingStatus::kPass;
  return out;
}

}  // namespace lyapdecomp
