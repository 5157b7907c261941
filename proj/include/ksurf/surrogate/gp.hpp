#pragma once

#include "ksurf/common/types.hpp"

#include <string>
#include <vector>

namespace ksurf::surrogate {

/// Squared-exponential kernel sf2 * exp(-|a - b|^2 / (2 l^2)).
struct Kernel {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 0.01;

  void validate() const;
  double operator()(const Vector& a, const Vector& b) const;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;  // latent variance, clipped at 0
};

/// A fitted GP. Immutable after gp_fit / gp_extend.
class GpModel {
public:
  GpModel() = default;

  const Kernel& kernel() const { return kernel_; }
  std::size_t size() const { return static_cast<std::size_t>(X_.cols()); }
  Index input_dim() const { return X_.rows(); }
  const Matrix& inputs() const { return X_; }  // d x n
  const Vector& targets() const { return y_; }
  double jitter() const { return jitter_; }

  /// K + noise * I + jitter * I as factorised.
  Matrix gram() const;

  /// Size, jitter, diagonal range of the factor and a condition estimate.
  std::string diagnostics() const;

private:
  friend GpModel gp_fit(const std::vector<Vector>&, const std::vector<double>&, const Kernel&);
  friend GpModel gp_extend(GpModel, const Vector&, const Vector&);
  friend Posterior gp_posterior(const GpModel&, const Vector&);

  void solve_alpha();

  Kernel kernel_;
  Matrix X_;
  Vector y_;
  Matrix chol_;  // lower factor
  Vector alpha_;
  double jitter_ = 0.0;
};

/// Cholesky of K + noise * I. If that fails, retries once with jitter
/// 1e-8 * mean diagonal and throws NumericalError if it still fails.
/// The cost is cubic in the number of points on every call.
GpModel gp_fit(const std::vector<Vector>& inputs, const std::vector<double>& targets, const Kernel& kernel);

/// Appends one input and replaces all targets (size n + 1). Grows the
/// factor by one row in O(n^2); falls back to a full gp_fit when the new
/// pivot is not positive.
GpModel gp_extend(GpModel model, const Vector& x, const Vector& targets);

/// Predictive mean and latent variance at x. An empty model returns the prior (0, sf2).
Posterior gp_posterior(const GpModel& model, const Vector& x);

}  // namespace ksurf::surrogate
