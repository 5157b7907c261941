#pragma once

#include "ksurf/estimator/system_model.hpp"

namespace ksurf::estimator {

/// Filter mean and covariance at discrete step k.
struct StateEstimate {
  Vector x;
  Matrix P;
  long step = 0;

  /// Zero mean with P = I, the default when no prior is known.
  static StateEstimate identity_prior(Index n);
};

enum class CovarianceUpdate { Standard, Joseph };

struct UpdateResult {
  StateEstimate estimate;
  bool accepted = true;  // false when z was rejected and the prior returned
};

/// x- = f(x), P- = J P J^T + Q. The step index is left unchanged.
StateEstimate kf_predict(const StateEstimate& state, const SystemModel& model);

/// K = P- H^T (H P- H^T + R)^-1. Throws NumericalError when the innovation
/// covariance is singular.
Matrix kf_gain(const Matrix& P_prior, const Matrix& H, const Matrix& R);

/// Measurement update. Non-finite z leaves the prior untouched and sets accepted=false.
UpdateResult kf_update(const StateEstimate& prior, const Vector& z, const SystemModel& model,
                       CovarianceUpdate form = CovarianceUpdate::Standard);

/// Smallest eigenvalue of the symmetric part of P.
double min_eigenvalue(const Matrix& P);

}  // namespace ksurf::estimator
