#pragma once

#include "ksurf/common/types.hpp"

#include <string>
#include <vector>

namespace ksurf::estimator {

/// Top-k principal directions of a sample cloud.
struct PcaBasis {
  Vector mean;
  Matrix components;           // k x dim, orthonormal rows
  Vector explained_variance;   // k, non-increasing
  std::string warning;         // set when the fit degenerated

  Index k() const { return components.rows(); }
  Index dim() const { return mean.size(); }

  Vector project(const Vector& z) const;
  Vector reconstruct(const Vector& coords) const;

  /// Basis that keeps every coordinate unchanged.
  static PcaBasis identity(Index dim);
};

/// Fits the top-k components of the mean-centred samples.
///
/// Zero-variance input yields a basis with k = 0 and a warning. Component
/// signs are fixed so the largest-magnitude entry of each row is positive.
PcaBasis fit_pca(const std::vector<Vector>& samples, Index k);

}  // namespace ksurf::estimator
