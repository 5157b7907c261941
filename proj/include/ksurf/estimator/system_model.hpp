#pragma once

#include "ksurf/common/types.hpp"

#include <functional>

namespace ksurf::estimator {

using VectorFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

/// Transition/observation pair with additive Gaussian noise.
///
/// A linear model stores A and H and uses them as exact Jacobians. A
/// nonlinear model stores f and h; Jacobians come from the optional
/// providers, falling back to central finite differences with step
/// 1e-6 * (1 + |x_i|).
struct SystemModel {
  Matrix A;  // n x n, linear case only
  Matrix H;  // p x n, linear case only
  VectorFn transition;
  VectorFn observation;
  JacobianFn transition_jacobian;
  JacobianFn observation_jacobian;
  Matrix Q;  // n x n process noise
  Matrix R;  // p x p measurement noise

  static SystemModel linear(Matrix A, Matrix H, Matrix Q, Matrix R);
  static SystemModel nonlinear(VectorFn f, VectorFn h, Matrix Q, Matrix R);

  /// Scalar random walk: x_k = x_{k-1} + w, z = x + u.
  static SystemModel random_walk(double q, double r);

  bool is_linear() const { return !transition && !observation; }
  Index state_dim() const { return Q.rows(); }
  Index measurement_dim() const { return R.rows(); }

  Vector propagate(const Vector& x) const;
  Vector observe(const Vector& x) const;
  Matrix transition_jacobian_at(const Vector& x) const;
  Matrix observation_jacobian_at(const Vector& x) const;

  /// Copy with Q and R replaced.
  SystemModel with_noise(Matrix q, Matrix r) const;

  /// Throws ConfigError on dimension mismatch or non-symmetric / indefinite noise.
  void validate() const;
};

/// Central finite-difference Jacobian of fn at x.
Matrix numerical_jacobian(const VectorFn& fn, const Vector& x);

}  // namespace ksurf::estimator
