#include "ksurf/estimator/pca.hpp"

#include <string>

namespace ksurf::estimator {

Vector PcaBasis::project(const Vector& z) const {
  if (z.size() != dim()) {
    throw ConfigError("pca project: expected dimension " + std::to_string(dim()));
  }
  return components * (z - mean);
}

Vector PcaBasis::reconstruct(const Vector& coords) const {
  if (coords.size() != k()) {
    throw ConfigError("pca reconstruct: expected " + std::to_string(k()) + " coordinates");
  }
  return mean + components.transpose() * coords;
}

PcaBasis PcaBasis::identity(Index dim) {
  PcaBasis b;
  b.mean = Vector::Zero(dim);
  b.components = Matrix::Identity(dim, dim);
  b.explained_variance = Vector::Ones(dim);
  return b;
}

PcaBasis fit_pca(const std::vector<Vector>& samples, Index k) {
  if (samples.size() < 2) {
    throw ConfigError("fit_pca needs at least 2 samples");
  }
  const Index dim = samples.front().size();
  if (k < 0 || k > dim) {
    throw ConfigError("fit_pca: k must be in [0, " + std::to_string(dim) + "]");
  }
  Matrix X(static_cast<Index>(samples.size()), dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != dim) {
      throw ConfigError("fit_pca: samples have inconsistent dimensions");
    }
    X.row(static_cast<Index>(i)) = samples[i].transpose();
  }
  PcaBasis basis;
  basis.mean = X.colwise().mean().transpose();
  X.rowwise() -= basis.mean.transpose();
  const Matrix cov = (X.transpose() * X) / static_cast<double>(samples.size() - 1);

  const double total = cov.trace();
  const double tol = 1e-12 * (1.0 + basis.mean.squaredNorm());
  if (!(total > tol)) {
    basis.components = Matrix::Zero(0, dim);
    basis.explained_variance = Vector::Zero(0);
    basis.warning = "zero-variance samples: PCA basis is empty";
    return basis;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  // Eigen returns ascending eigenvalues.
  basis.components.resize(k, dim);
  basis.explained_variance.resize(k);
  for (Index i = 0; i < k; ++i) {
    const Index src = dim - 1 - i;
    Vector v = eig.eigenvectors().col(src);
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) {
      v = -v;
    }
    basis.components.row(i) = v.transpose();
    basis.explained_variance(i) = std::max(0.0, eig.eigenvalues()(src));
  }
  return basis;
}

}  // namespace ksurf::estimator
