#include "ksurf/bandit/synthetic.hpp"

#include "ksurf/estimator/kalman.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace ksurf::bandit {

SyntheticLinearBandit::SyntheticLinearBandit(SyntheticBanditConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  if (cfg.arms < 1 || cfg.dim < 1 || cfg.rounds < 1 || !(cfg.q > 0.0) || !(cfg.r > 0.0) ||
      !(cfg.reward_noise >= 0.0)) {
    throw ConfigError("synthetic bandit: arms, dim, rounds >= 1 and q, r > 0 required");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  const double s = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  theta_ = Vector(cfg.dim);
  for (Index i = 0; i < theta_.size(); ++i) theta_(i) = n01(rng);
  theta_.normalize();
  for (int a = 0; a < cfg.arms; ++a) {
    Vector u(cfg.dim);
    Vector b(cfg.dim);
    for (Index i = 0; i < u.size(); ++i) {
      u(i) = n01(rng) * s;
      b(i) = 0.3 * n01(rng) * s;
    }
    u_.push_back(u);
    b_.push_back(b);
  }
  std::normal_distribution<double> w(0.0, std::sqrt(cfg.q));
  std::normal_distribution<double> v(0.0, std::sqrt(cfg.r));
  std::normal_distribution<double> e(0.0, cfg.reward_noise);
  double x = std::sqrt(cfg.q / std::max(1e-12, 1.0 - cfg.a * cfg.a)) * n01(rng);
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    x = cfg.a * x + w(rng);
    x_.push_back(x);
    z_.push_back(x + v(rng));
    noise_.push_back(cfg.reward_noise > 0.0 ? e(rng) : 0.0);
  }
}

Vector SyntheticLinearBandit::context(int arm, double x) const {
  return project_unit_ball(x * u_[static_cast<std::size_t>(arm)] + b_[static_cast<std::size_t>(arm)]);
}

double SyntheticLinearBandit::expected_reward(int arm, double x) const { return context(arm, x).dot(theta_); }

Vector SyntheticLinearBandit::context_jacobian(double x) const {
  Vector J(static_cast<Index>(cfg_.arms) * cfg_.dim);
  const double h = 1e-6 * (1.0 + std::abs(x));
  for (int a = 0; a < cfg_.arms; ++a) {
    J.segment(static_cast<Index>(a) * cfg_.dim, cfg_.dim) = (context(a, x + h) - context(a, x - h)) / (2.0 * h);
  }
  return J;
}

SyntheticRun SyntheticLinearBandit::run(ContextMode mode) const {
  const auto model = estimator::SystemModel::linear(Matrix::Constant(1, 1, cfg_.a), Matrix::Ones(1, 1),
                                                    Matrix::Constant(1, 1, cfg_.q), Matrix::Constant(1, 1, cfg_.r));
  estimator::StateEstimate kf;
  std::unique_ptr<RewardModel> learner;
  if (cfg_.known_theta) {
    learner = std::make_unique<KnownLinearModel>(theta_);
  } else {
    learner = std::make_unique<LinearRewardModel>(cfg_.dim);
  }
  RunningVariance residuals;
  SyntheticRun out;
  for (std::size_t t = 0; t < cfg_.rounds; ++t) {
    const double x = x_[t];
    double estimate = z_[t];
    double tr_jpj = 0.0;
    const double jj = context_jacobian(x).squaredNorm();
    const double tr_jrj = jj * cfg_.r;
    if (mode == ContextMode::Filtered) {
      if (t == 0) {
        kf.x = Vector::Constant(1, z_[0]);
        kf.P = Matrix::Constant(1, 1, cfg_.r);
      } else {
        kf = estimator::kf_update(estimator::kf_predict(kf, model), Vector::Constant(1, z_[t]), model).estimate;
      }
      estimate = kf.x(0);
      tr_jpj = jj * kf.P(0, 0);
    } else if (mode == ContextMode::Truth) {
      estimate = x;
    } else {
      tr_jpj = tr_jrj;
    }

    ArmSet arms;
    double err = 0.0;
    for (int a = 0; a < cfg_.arms; ++a) {
      arms.actions.push_back(a);
      const Vector c = context(a, estimate);
      err += (c - context(a, x)).squaredNorm();
      arms.contexts.push_back({c, mode == ContextMode::Filtered ? ContextSource::Ekf : ContextSource::RawObservation});
    }
    out.context_error.push_back(err);

    const double beta = cfg_.known_theta ? 0.0 : beta_schedule(arms.size(), t + 1);
    const std::size_t chosen = select_action(arms, *learner, beta);
    double oracle = expected_reward(0, x);
    for (int a = 1; a < cfg_.arms; ++a) oracle = std::max(oracle, expected_reward(a, x));
    const double expected = expected_reward(static_cast<int>(chosen), x);
    const double observed = expected + noise_[t];
    residuals.add(observed - learner->predict(arms.contexts[chosen].c).mean);
    learner->observe(arms.contexts[chosen].c, observed);
    const double nu2 = residuals.variance();
    const double rh = (tr_jrj + nu2) > 0.0 ? rho(tr_jpj, tr_jrj, nu2) : 1.0;
    out.trace.record(chosen, oracle, expected, rh, tr_jpj, tr_jrj, nu2);
  }
  return out;
}

}  // namespace ksurf::bandit
