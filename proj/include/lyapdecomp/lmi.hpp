#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lyapdecomp {

/// Values of scalar unknowns by id.
using Assignment = std::map<std::string, double>;

class UnassignedUnknown : public std::out_of_range {
 public:
  explicit UnassignedUnknown(const std::string& id)
      : std::out_of_range("no value for unknown \"" + id + "\""), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// Symmetric matrix affine in scalar unknowns:
/// constant + sum_u value(u) * terms[u]. Every block has the same size.
struct AffineSymMatrix {
  Eigen::MatrixXd constant;
  std::map<std::string, Eigen::MatrixXd> terms;

  AffineSymMatrix() = default;
  explicit AffineSymMatrix(Eigen::MatrixXd c) : constant(std::move(c)) {}
  static AffineSymMatrix zero(Eigen::Index size) {
    return AffineSymMatrix(Eigen::MatrixXd::Zero(size, size));
  }

  Eigen::Index size() const { return constant.rows(); }
  void add_term(const std::string& id, const Eigen::MatrixXd& coefficient);

  AffineSymMatrix& operator+=(const AffineSymMatrix& other);
  AffineSymMatrix& operator-=(const AffineSymMatrix& other);
  AffineSymMatrix operator*(double s) const;
  /// T^T X T for a square T of matching size.
  AffineSymMatrix congruence(const Eigen::MatrixXd& T) const;
  /// X T + T^T X, the derivative form of the Lyapunov operator.
  AffineSymMatrix lyapunov(const Eigen::MatrixXd& T) const;

  /// Throws UnassignedUnknown.
  Eigen::MatrixXd evaluate(const Assignment& values) const;
};

inline AffineSymMatrix operator+(AffineSymMatrix a, const AffineSymMatrix& b) { return a += b; }
inline AffineSymMatrix operator-(AffineSymMatrix a, const AffineSymMatrix& b) { return a -= b; }

/// form(x) ⪰ 0. The strengthening matrix is a margin the solver enforces on
/// top (form - strengthening ⪰ 0); validation ignores it.
struct LinearMatrixInequality {
  std::string name;
  AffineSymMatrix form;
  Eigen::MatrixXd strengthening;

  Eigen::Index size() const { return form.size(); }
  /// form with the strengthening subtracted from its constant.
  AffineSymMatrix strengthened() const;
};

struct Unknown {
  std::string id;
  bool nonnegative = false;

  bool operator==(const Unknown&) const = default;
};

struct SDPProblem {
  /// Declaration order is the solver's and exporter's variable order.
  std::vector<Unknown> unknowns;
  std::vector<LinearMatrixInequality> constraints;
  /// Linear functional to minimize; empty for a pure feasibility problem.
  std::map<std::string, double> objective;
  /// Sum of the traces of all templates as a linear functional; drives the
  /// trace-directed candidates.
  std::map<std::string, double> trace_functional;

  /// Adds `u` unless an unknown with the same id exists; a sign mismatch
  /// with the existing declaration throws std::invalid_argument.
  void declare(const Unknown& u);
  const Unknown* find(const std::string& id) const;
  std::size_t index_of(const std::string& id) const;
  void append(const SDPProblem& other);
};

/// Structural problems: undeclared unknowns, non-square or mismatched blocks,
/// asymmetric coefficients. Empty means the problem is a well-formed system
/// of LMIs.
std::vector<std::string> check_problem(const SDPProblem& p);

inline double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace lyapdecomp
