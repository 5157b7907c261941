#include "ksurf/ksurfnet/noise_gradient.hpp"

namespace ksurf::ksurfnet {

StepGradient prediction_loss_gradient(const estimator::StateEstimate& previous, const Vector& z,
                                      const Vector& z_next, const estimator::SystemModel& model) {
  const Index p = model.measurement_dim();
  const Index n = model.state_dim();
  if (z.size() != p || z_next.size() != p) {
    throw ConfigError("prediction_loss_gradient: measurement dimension mismatch");
  }
  const estimator::StateEstimate prior = estimator::kf_predict(previous, model);
  const Matrix H = model.observation_jacobian_at(prior.x);
  const Matrix S = H * prior.P * H.transpose() + model.R;
  Eigen::FullPivLU<Matrix> lu(S);
  if (!lu.isInvertible()) {
    throw NumericalError("innovation covariance S = H P H^T + R is singular");
  }
  const Matrix S_inv = lu.inverse();
  const Matrix K = prior.P * H.transpose() * S_inv;
  const Vector nu = z - model.observe(prior.x);

  StepGradient out;
  out.posterior.x = prior.x + K * nu;
  out.posterior.P = symmetrize((Matrix::Identity(n, n) - K * H) * prior.P);
  out.posterior.step = previous.step + 1;

  const Vector x_next = model.propagate(out.posterior.x);
  const Vector e = z_next - model.observe(x_next);
  out.loss = e.squaredNorm() / static_cast<double>(p);
  if (!std::isfinite(out.loss)) {
    throw NumericalError("prediction_loss_gradient: non-finite loss");
  }

  const Matrix G = model.observation_jacobian_at(x_next) * model.transition_jacobian_at(out.posterior.x);
  const Vector dx = -(2.0 / static_cast<double>(p)) * G.transpose() * e;
  const Matrix dK = dx * nu.transpose();  // n x p
  const Matrix dK_Sinv = dK * S_inv;
  const Matrix dR = -K.transpose() * dK_Sinv;
  const Matrix dP = dK_Sinv * H - H.transpose() * K.transpose() * dK_Sinv * H;
  out.d_r = dR.diagonal();
  out.d_q = dP.diagonal();  // P- = J P J^T + Q, so dQ_jj = dP-_jj
  return out;
}

}  // namespace ksurf::ksurfnet
