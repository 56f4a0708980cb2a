#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lyapdecomp/automaton.hpp"
#include "lyapdecomp/constraints.hpp"
#include "lyapdecomp/kernels.hpp"
#include "lyapdecomp/lmi.hpp"

namespace lyapdecomp {

/// Piecewise quadratic Lyapunov certificate.
struct QuadraticCertificate {
  /// Homogenized P per template (mode or mode copy), (n+1) x (n+1).
  std::map<std::string, Eigen::MatrixXd> templates;
  /// Every unknown of the certificate problem: P entries, S-procedure
  /// multipliers, conical coefficients.
  Assignment values;
  ClassKParams class_k;
  /// Conical coefficients per collapsed region, in candidate order.
  std::map<std::string, std::vector<double>> conical;
};

struct ExactCheckResult {
  bool pass = true;
  /// Name of the first failing LMI or sign-constrained unknown.
  std::string failed;
  double min_eigenvalue = 0.0;
  std::string details;
};

inline constexpr double kDefaultTolEig = 1e-8;
inline constexpr double kDefaultTolSem = 1e-6;
inline constexpr std::size_t kDefaultSamples = 10000;
inline constexpr double kDefaultSampleBox = 10.0;

/// Every LMI of `problem` evaluated at cert.values without strengthening must
/// have minimum eigenvalue >= -tol_eig; sign-constrained unknowns must be
/// >= 0. Throws UnassignedUnknown when a value is missing.
ExactCheckResult check_certificate_exact(const SDPProblem& problem,
                                         const QuadraticCertificate& cert,
                                         double tol_eig = kDefaultTolEig);

enum class SamplingStatus { kPass, kFail, kInconclusive };

const char* to_string(SamplingStatus s);

struct SamplingOptions {
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = 1;
  double tol_sem = kDefaultTolSem;
  /// Half-width of the default box for unbounded directions.
  double box = kDefaultSampleBox;
  std::size_t max_rejections = 1000;
  ExecPolicy policy = ExecPolicy::kParallel;
};

struct SamplingResult {
  SamplingStatus status = SamplingStatus::kPass;
  /// Mode or transition id of the witness, and the violated condition:
  /// "lower", "upper", "decrease(k)" or "jump".
  std::string element;
  std::string condition;
  Eigen::VectorXd witness;
  /// Relative violation at the witness.
  double violation = 0.0;
  std::size_t points_checked = 0;
  std::string details;
};

/// Samples every mode invariant and every guard of `a` and checks the bound,
/// decrease and jump conditions with the certificate's class-K functions.
/// Templates are looked up by mode id. A mode without a template is a
/// failure unless its invariant is empty.
SamplingResult check_certificate_sampling(const HybridAutomaton& a,
                                          const QuadraticCertificate& cert,
                                          const SamplingOptions& opts = {});

/// Points of p drawn by rejection from its bounding box (unbounded sides are
/// replaced by the default box). Slot i depends only on (seed, stream, i);
/// slots whose rejection budget runs out are absent. Both policies return
/// the same points.
std::vector<Eigen::VectorXd> sample_polyhedron(const Polyhedron& p, std::size_t n,
                                               std::uint64_t seed, std::uint64_t stream,
                                               double box, std::size_t max_rejections,
                                               ExecPolicy policy);

/// V(x) = z^T P z.
double evaluate_quadratic(const Eigen::MatrixXd& P, const Eigen::VectorXd& x);

}  // namespace lyapdecomp
