#include "ksurf/surrogate/gp.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace ksurf::surrogate {

void Kernel::validate() const {
  if (!(lengthscale > 0.0) || !(signal_variance > 0.0) || !(noise_variance >= 0.0) ||
      !std::isfinite(lengthscale) || !std::isfinite(signal_variance) || !std::isfinite(noise_variance)) {
    throw ConfigError("kernel: lengthscale and signal variance must be positive, noise variance non-negative");
  }
}

double Kernel::operator()(const Vector& a, const Vector& b) const {
  return signal_variance * std::exp(-(a - b).squaredNorm() / (2.0 * lengthscale * lengthscale));
}

namespace {

Matrix cross_kernel(const Kernel& k, const Matrix& A, const Matrix& B) {
  // |a - b|^2 = |a|^2 + |b|^2 - 2 a.b
  const Vector na = A.colwise().squaredNorm().transpose();
  const Vector nb = B.colwise().squaredNorm().transpose();
  Matrix d2 = (-2.0 * A.transpose() * B).colwise() + na;
  d2.rowwise() += nb.transpose();
  const double inv = 1.0 / (2.0 * k.lengthscale * k.lengthscale);
  return (k.signal_variance * (-(d2.array().max(0.0)) * inv).exp()).matrix();
}

}  // namespace

GpModel gp_fit(const std::vector<Vector>& inputs, const std::vector<double>& targets, const Kernel& kernel) {
  kernel.validate();
  if (inputs.size() != targets.size()) {
    throw ConfigError("gp_fit: " + std::to_string(inputs.size()) + " inputs but " + std::to_string(targets.size()) +
                      " targets");
  }
  GpModel m;
  m.kernel_ = kernel;
  if (inputs.empty()) {
    return m;
  }
  const Index d = inputs.front().size();
  const auto n = static_cast<Index>(inputs.size());
  m.X_.resize(d, n);
  m.y_.resize(n);
  for (Index i = 0; i < n; ++i) {
    const Vector& x = inputs[static_cast<std::size_t>(i)];
    if (x.size() != d) {
      throw ConfigError("gp_fit: inputs have inconsistent dimensions");
    }
    if (!x.allFinite() || !std::isfinite(targets[static_cast<std::size_t>(i)])) {
      throw ConfigError("gp_fit: non-finite training data");
    }
    m.X_.col(i) = x;
    m.y_(i) = targets[static_cast<std::size_t>(i)];
  }
  Matrix K = cross_kernel(kernel, m.X_, m.X_);
  K.diagonal().array() += kernel.noise_variance;
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    m.jitter_ = 1e-8 * K.diagonal().mean();
    K.diagonal().array() += m.jitter_;
    llt.compute(K);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("gp_fit: gram matrix is not positive definite even after jitter " +
                           std::to_string(m.jitter_));
    }
  }
  m.chol_ = llt.matrixL();
  m.solve_alpha();
  return m;
}

void GpModel::solve_alpha() {
  alpha_ = chol_.triangularView<Eigen::Lower>().solve(y_);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
}

GpModel gp_extend(GpModel model, const Vector& x, const Vector& targets) {
  const auto n = static_cast<Index>(model.size());
  if (targets.size() != n + 1) {
    throw ConfigError("gp_extend: expected " + std::to_string(n + 1) + " targets");
  }
  if (!x.allFinite() || !targets.allFinite()) {
    throw ConfigError("gp_extend: non-finite training data");
  }
  auto refit = [&] {
    std::vector<Vector> xs;
    xs.reserve(static_cast<std::size_t>(n) + 1);
    for (Index i = 0; i < n; ++i) {
      xs.push_back(model.X_.col(i));
    }
    xs.push_back(x);
    return gp_fit(xs, std::vector<double>(targets.data(), targets.data() + targets.size()), model.kernel_);
  };
  if (n == 0) {
    return refit();
  }
  if (x.size() != model.input_dim()) {
    throw ConfigError("gp_extend: input dimension does not match the training inputs");
  }
  const Kernel& k = model.kernel_;
  const Vector kx = cross_kernel(k, model.X_, x);
  const Vector l = model.chol_.triangularView<Eigen::Lower>().solve(kx);
  const double pivot = k.signal_variance + k.noise_variance + model.jitter_ - l.squaredNorm();
  if (!(pivot > 0.0)) {
    return refit();
  }
  model.X_.conservativeResize(Eigen::NoChange, n + 1);
  model.X_.col(n) = x;
  model.chol_.conservativeResize(n + 1, n + 1);
  model.chol_.col(n).setZero();
  model.chol_.row(n).head(n) = l.transpose();
  model.chol_(n, n) = std::sqrt(pivot);
  model.y_ = targets;
  model.solve_alpha();
  return model;
}

Posterior gp_posterior(const GpModel& model, const Vector& x) {
  const Kernel& k = model.kernel_;
  if (model.size() == 0) {
    return {0.0, k.signal_variance};
  }
  if (x.size() != model.input_dim()) {
    throw ConfigError("gp_posterior: query dimension does not match the training inputs");
  }
  const Vector ks = cross_kernel(k, model.X_, x);
  Posterior p;
  p.mean = ks.dot(model.alpha_);
  const Vector v = model.chol_.triangularView<Eigen::Lower>().solve(ks);
  p.variance = std::max(0.0, k.signal_variance - v.squaredNorm());
  return p;
}

Matrix GpModel::gram() const {
  if (size() == 0) {
    return Matrix(0, 0);
  }
  Matrix K = cross_kernel(kernel_, X_, X_);
  K.diagonal().array() += kernel_.noise_variance + jitter_;
  return K;
}

std::string GpModel::diagnostics() const {
  std::ostringstream out;
  out << "gp n=" << size() << " dim=" << input_dim() << " jitter=" << jitter_;
  if (size() > 0) {
    const Vector diag = chol_.diagonal();
    const double lo = diag.minCoeff();
    const double hi = diag.maxCoeff();
    out << " chol_diag_min=" << lo << " chol_diag_max=" << hi << " cond_estimate=" << (hi * hi) / (lo * lo);
  }
  return out.str();
}

}  // namespace ksurf::surrogate
