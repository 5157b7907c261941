#include "ksurf/estimator/system_model.hpp"

#include <cmath>
#include <string>

namespace ksurf::estimator {

namespace {

void check_psd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw ConfigError(std::string(name) + " must be square");
  }
  if (!m.allFinite()) {
    throw ConfigError(std::string(name) + " has non-finite entries");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ConfigError(std::string(name) + " must be symmetric");
  }
  if (m.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-9 * scale) {
      throw ConfigError(std::string(name) + " must be positive semidefinite");
    }
  }
}

}  // namespace

SystemModel SystemModel::linear(Matrix A, Matrix H, Matrix Q, Matrix R) {
  SystemModel m;
  m.A = std::move(A);
  m.H = std::move(H);
  m.Q = std::move(Q);
  m.R = std::move(R);
  m.validate();
  return m;
}

SystemModel SystemModel::nonlinear(VectorFn f, VectorFn h, Matrix Q, Matrix R) {
  if (!f || !h) {
    throw ConfigError("nonlinear model needs both transition and observation functions");
  }
  SystemModel m;
  m.transition = std::move(f);
  m.observation = std::move(h);
  m.Q = std::move(Q);
  m.R = std::move(R);
  m.validate();
  return m;
}

SystemModel SystemModel::random_walk(double q, double r) {
  return linear(Matrix::Identity(1, 1), Matrix::Identity(1, 1), Matrix::Constant(1, 1, q),
                Matrix::Constant(1, 1, r));
}

Vector SystemModel::propagate(const Vector& x) const {
  if (transition) {
    return transition(x);
  }
  return A * x;
}

Vector SystemModel::observe(const Vector& x) const {
  if (observation) {
    return observation(x);
  }
  return H * x;
}

Matrix SystemModel::transition_jacobian_at(const Vector& x) const {
  if (!transition) {
    return A;
  }
  if (transition_jacobian) {
    return transition_jacobian(x);
  }
  return numerical_jacobian(transition, x);
}

Matrix SystemModel::observation_jacobian_at(const Vector& x) const {
  if (!observation) {
    return H;
  }
  if (observation_jacobian) {
    return observation_jacobian(x);
  }
  return numerical_jacobian(observation, x);
}

SystemModel SystemModel::with_noise(Matrix q, Matrix r) const {
  SystemModel m = *this;
  m.Q = std::move(q);
  m.R = std::move(r);
  m.validate();
  return m;
}

void SystemModel::validate() const {
  check_psd(Q, "process noise Q");
  check_psd(R, "measurement noise R");
  const Index n = state_dim();
  const Index p = measurement_dim();
  if (n == 0 || p == 0) {
    throw ConfigError("system model needs non-empty Q and R");
  }
  if (!transition) {
    if (A.rows() != n || A.cols() != n) {
      throw ConfigError("transition matrix A must be " + std::to_string(n) + "x" + std::to_string(n));
    }
  }
  if (!observation) {
    if (H.rows() != p || H.cols() != n) {
      throw ConfigError("observation matrix H must be " + std::to_string(p) + "x" + std::to_string(n));
    }
  }
}

Matrix numerical_jacobian(const VectorFn& fn, const Vector& x) {
  const Vector f0 = fn(x);
  Matrix J(f0.size(), x.size());
  Vector xp = x;
  Vector xm = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    xp(i) = x(i) + h;
    xm(i) = x(i) - h;
    J.col(i) = (fn(xp) - fn(xm)) / (2.0 * h);
    xp(i) = x(i);
    xm(i) = x(i);
  }
  return J;
}

}  // namespace ksurf::estimator
