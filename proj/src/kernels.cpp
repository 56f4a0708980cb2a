#include "lyapdecomp/kernels.hpp"

#include <algorithm>

namespace lyapdecomp {

BlockLayout::BlockLayout(std::vector<Eigen::Index> block_sizes) : sizes(std::move(block_sizes)) {
  offsets.reserve(sizes.size());
  for (Eigen::Index d : sizes) {
    offsets.push_back(total_);
    total_ += d * d;
  }
}

namespace {

double project_one(Eigen::Index d, double* data) {
  Eigen::Map<Eigen::MatrixXd> block(data, d, d);
  if (d == 1) {
    const double v = block(0, 0);
    if (v >= 0.0) return 0.0;
    block(0, 0) = 0.0;
    return -v;
  }
  const Eigen::MatrixXd sym = 0.5 * (block + block.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd& w = es.eigenvalues();
  const double clipped = std::max(0.0, -w(0));
  if (w(0) >= 0.0) {
    block = sym;
    return 0.0;
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  block = v * w.cwiseMax(0.0).asDiagonal() * v.transpose();
  return clipped;
}

double min_eig_one(Eigen::Index d, const double* data) {
  Eigen::Map<const Eigen::MatrixXd> block(data, d, d);
  if (d == 1) return block(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

double project_psd_blocks(const BlockLayout& layout, Eigen::VectorXd* s, ExecPolicy policy) {
  const auto n = static_cast<std::ptrdiff_t>(layout.sizes.size());
  double worst = 0.0;
  double* data = s->data();
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      worst = std::max(worst, project_one(layout.sizes[j], data + layout.offsets[j]));
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      worst = std::max(worst, project_one(layout.sizes[j], data + layout.offsets[j]));
    }
  }
  return worst;
}

Eigen::VectorXd block_min_eigenvalues(const BlockLayout& layout, const Eigen::VectorXd& s,
                                      ExecPolicy policy) {
  const auto n = static_cast<std::ptrdiff_t>(layout.sizes.size());
  Eigen::VectorXd out(n);
  const double* data = s.data();
  if (policy == ExecPolicy::kParallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      out(j) = min_eig_one(layout.sizes[j], data + layout.offsets[j]);
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      out(j) = min_eig_one(layout.sizes[j], data + layout.offsets[j]);
    }
  }
  return out;
}

}  // namespace lyapdecomp
