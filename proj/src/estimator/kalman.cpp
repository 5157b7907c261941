#include "ksurf/estimator/kalman.hpp"

#include <string>

namespace ksurf::estimator {

namespace {

void check_state(const StateEstimate& s, const SystemModel& model) {
  const Index n = model.state_dim();
  if (s.x.size() != n || s.P.rows() != n || s.P.cols() != n) {
    throw ConfigError("state estimate dimension " + std::to_string(s.x.size()) +
                      " does not match model state dimension " + std::to_string(n));
  }
}

}  // namespace

StateEstimate StateEstimate::identity_prior(Index n) {
  return StateEstimate{Vector::Zero(n), Matrix::Identity(n, n), 0};
}

StateEstimate kf_predict(const StateEstimate& state, const SystemModel& model) {
  check_state(state, model);
  const Matrix J = model.transition_jacobian_at(state.x);
  StateEstimate out;
  out.x = model.propagate(state.x);
  out.P = symmetrize(J * state.P * J.transpose() + model.Q);
  out.step = state.step;
  return out;
}

Matrix kf_gain(const Matrix& P_prior, const Matrix& H, const Matrix& R) {
  if (H.cols() != P_prior.rows() || R.rows() != H.rows() || R.cols() != H.rows()) {
    throw ConfigError("kf_gain: inconsistent dimensions for P, H, R");
  }
  const Matrix S = symmetrize(H * P_prior * H.transpose() + R);
  Eigen::FullPivLU<Matrix> lu(S);
  const double scale = S.cwiseAbs().maxCoeff();
  lu.setThreshold(1e-14);
  if (!S.allFinite() || scale == 0.0 || !lu.isInvertible()) {
    throw NumericalError("innovation covariance S = H P H^T + R is singular");
  }
  // K = P H^T S^-1 = (S^-1 H P)^T since S and P are symmetric.
  return lu.solve(H * P_prior).transpose();
}

UpdateResult kf_update(const StateEstimate& prior, const Vector& z, const SystemModel& model,
                       CovarianceUpdate form) {
  check_state(prior, model);
  if (z.size() != model.measurement_dim()) {
    throw ConfigError("measurement dimension " + std::to_string(z.size()) + " does not match model (" +
                      std::to_string(model.measurement_dim()) + ")");
  }
  if (!z.allFinite()) {
    return UpdateResult{prior, false};
  }
  const Matrix Ht = model.observation_jacobian_at(prior.x);
  const Matrix K = kf_gain(prior.P, Ht, model.R);
  const Vector innovation = z - model.observe(prior.x);

  StateEstimate post;
  post.x = prior.x + K * innovation;
  const Index n = prior.x.size();
  const Matrix IKH = Matrix::Identity(n, n) - K * Ht;
  if (form == CovarianceUpdate::Joseph) {
    post.P = IKH * prior.P * IKH.transpose() + K * model.R * K.transpose();
  } else {
    post.P = IKH * prior.P;
  }
  post.P = symmetrize(post.P);
  post.step = prior.step + 1;
  return UpdateResult{std::move(post), true};
}

double min_eigenvalue(const Matrix& P) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(P), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace ksurf::estimator
