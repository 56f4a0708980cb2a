#include "lyapdecomp/linprog.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lyapdecomp {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;

class Tableau {
 public:
  Tableau(int rows, int cols) : T_(Eigen::MatrixXd::Zero(rows + 1, cols + 1)), basis_(rows, -1) {}

  double& at(int i, int j) { return T_(i, j); }
  double rhs(int i) const { return T_(i, T_.cols() - 1); }
  int rows() const { return static_cast<int>(T_.rows()) - 1; }
  int cols() const { return static_cast<int>(T_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }

  void set_objective(const Eigen::VectorXd& cost) {
    const int m = rows();
    T_.row(m).setZero();
    T_.row(m).head(cols()) = cost.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) T_.row(m) -= cb * T_.row(i);
    }
  }

  double objective_value() const { return -T_(T_.rows() - 1, T_.cols() - 1); }

  void pivot(int r, int c) {
    T_.row(r) /= T_(r, c);
    for (int i = 0; i < T_.rows(); ++i) {
      if (i != r && T_(i, c) != 0.0) T_.row(i) -= T_(i, c) * T_.row(r);
    }
    basis_[r] = c;
  }

  /// Bland's rule over columns with allowed[j]. Returns false if unbounded.
  bool optimize(const std::vector<char>& allowed) {
    const int m = rows();
    while (true) {
      int enter = -1;
      for (int j = 0; j < cols(); ++j) {
        if (allowed[j] && T_(m, j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (T_(i, enter) > kPivotTol) {
          const double ratio = rhs(i) / T_(i, enter);
          if (ratio < best - 1e-12 ||
              (std::abs(ratio - best) <= 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
  }

 private:
  Eigen::MatrixXd T_;
  std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  LpResult result;
  if (m == 0) {
    result.x = Eigen::VectorXd::Zero(n);
    result.status = c.isZero(0.0) ? LpStatus::kOptimal : LpStatus::kUnbounded;
    return result;
  }

  // Columns: x+ (n), x- (n), slack (m), artificial (one per row with b < 0).
  std::vector<int> art_row;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) art_row.push_back(i);
  }
  const int n_art = static_cast<int>(art_row.size());
  const int cols = 2 * n + m + n_art;
  Tableau t(m, cols);
  int next_art = 2 * n + m;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      t.at(i, j) = sign * A(i, j);
      t.at(i, n + j) = -sign * A(i, j);
    }
    t.at(i, 2 * n + i) = sign;
    t.at(i, cols) = sign * b(i);
    if (b(i) < 0.0) {
      t.at(i, next_art) = 1.0;
      t.basis()[i] = next_art++;
    } else {
      t.basis()[i] = 2 * n + i;
    }
  }

  std::vector<char> allowed(cols, 1);
  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(cols);
    phase1.tail(n_art).setOnes();
    t.set_objective(phase1);
    t.optimize(allowed);
    if (t.objective_value() > kFeasTol) {
      result.status = LpStatus::kInfeasible;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      if (t.basis()[i] < 2 * n + m) continue;
      for (int j = 0; j < 2 * n + m; ++j) {
        if (std::abs(t.at(i, j)) > kPivotTol) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (int j = 2 * n + m; j < cols; ++j) allowed[j] = 0;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(cols);
  cost.head(n) = c;
  cost.segment(n, n) = -c;
  t.set_objective(cost);
  if (!t.optimize(allowed)) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(cols);
  for (int i = 0; i < m; ++i) z(t.basis()[i]) = t.rhs(i);
  result.status = LpStatus::kOptimal;
  result.x = z.head(n) - z.segment(n, n);
  result.value = c.dot(result.x);
  return result;
}

namespace {

void as_matrix(const Polyhedron& p, Eigen::MatrixXd* A, Eigen::VectorXd* b) {
  const auto n = static_cast<Eigen::Index>(p.dimension);
  A->resize(static_cast<Eigen::Index>(p.rows.size()), n);
  b->resize(static_cast<Eigen::Index>(p.rows.size()));
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    A->row(static_cast<Eigen::Index>(i)) = p.rows[i].a.transpose();
    (*b)(static_cast<Eigen::Index>(i)) = p.rows[i].b;
  }
}

}  // namespace

std::optional<Eigen::VectorXd> feasible_point(const Polyhedron& p) {
  if (p.trivially_empty()) return std::nullopt;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  as_matrix(p, &A, &b);
  const LpResult r = solve_lp(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.dimension)), A, b);
  if (r.status != LpStatus::kOptimal) return std::nullopt;
  return r.x;
}

bool is_empty(const Polyhedron& p) { return !feasible_point(p).has_value(); }

BoundingBox bounding_box(const Polyhedron& p) {
  const auto n = static_cast<Eigen::Index>(p.dimension);
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  as_matrix(p, &A, &b);
  constexpr double inf = std::numeric_limits<double>::infinity();
  BoundingBox box{Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf),
                  Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false),
                  Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false)};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = 1.0;
    const LpResult lo = solve_lp(e, A, b);
    if (lo.status == LpStatus::kOptimal) {
      box.lower(i) = lo.value;
      box.lower_finite(i) = true;
    }
    const LpResult hi = solve_lp(-e, A, b);
    if (hi.status == LpStatus::kOptimal) {
      box.upper(i) = -hi.value;
      box.upper_finite(i) = true;
    }
  }
  return box;
}

}  // namespace lyapdecomp
