#pragma once

#include "ksurf/estimator/kalman.hpp"

namespace ksurf::ksurfnet {

/// Result of one filter step followed by a one-step-ahead prediction.
struct StepGradient {
  double loss = 0.0;                  // mean squared prediction residual for z_next
  Vector d_r;                         // dLoss / dR_ii
  Vector d_q;                         // dLoss / dQ_jj
  estimator::StateEstimate posterior; // filter state after consuming z
};

/// Runs predict + update with `model` (whose R, Q are the candidate noise)
/// from `previous`, then scores the prediction of z_next. The gradient
/// holds the previous posterior fixed and differentiates only through the
/// gain of this step.
StepGradient prediction_loss_gradient(const estimator::StateEstimate& previous, const Vector& z,
                                      const Vector& z_next, const estimator::SystemModel& model);

}  // namespace ksurf::ksurfnet
