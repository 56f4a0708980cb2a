#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lyapdecomp {

/// Selects between the serial reference kernels and their OpenMP versions.
/// Both produce bit-identical results.
enum class ExecPolicy { kSerial, kParallel };

/// Packed symmetric blocks, stored as full column-major matrices back to back.
struct BlockLayout {
  std::vector<Eigen::Index> sizes;
  std::vector<Eigen::Index> offsets;

  explicit BlockLayout(std::vector<Eigen::Index> block_sizes);
  Eigen::Index total() const { return total_; }

 private:
  Eigen::Index total_ = 0;
};

/// Projects every block of `s` onto the PSD cone in place (eigenvalue
/// clipping after symmetrization). Returns the largest eigenvalue clipped,
/// as a nonnegative number.
double project_psd_blocks(const BlockLayout& layout, Eigen::VectorXd* s, ExecPolicy policy);

/// Minimum eigenvalue of each block.
Eigen::VectorXd block_min_eigenvalues(const BlockLayout& layout, const Eigen::VectorXd& s,
                                      ExecPolicy policy);

}  // namespace lyapdecomp
