#pragma once

#include "ksurf/bandit/bandit.hpp"

#include <cstdint>
#include <vector>

namespace ksurf::bandit {

/// A linear contextual bandit driven by a hidden scalar AR(1) state.
///
/// x_t = a x_{t-1} + w,  z_t = x_t + v,  c_a(x) = proj(x u_a + b_a),
/// E[r | c] = c^T theta*. The agent sees contexts built from an estimate of
/// x (the raw z_t or a Kalman filter estimate) while the oracle uses x_t.
struct SyntheticBanditConfig {
  int arms = 4;
  int dim = 3;
  double a = 0.99;
  double q = 1e-3;
  double r = 0.05;
  double reward_noise = 0.01;
  std::size_t rounds = 2000;
  bool known_theta = true;  // greedy on the true theta; otherwise ridge + UCB
};

enum class ContextMode { Raw, Filtered, Truth };

struct SyntheticRun {
  RegretTrace trace;
  std::vector<double> context_error;  // sum over arms of |c_a(estimate) - c_a(x)|^2 per round
};

class SyntheticLinearBandit {
public:
  SyntheticLinearBandit(SyntheticBanditConfig cfg, std::uint64_t seed);

  /// Plays every round with contexts from `mode`. Paired runs share the state
  /// path, measurements and reward noise.
  SyntheticRun run(ContextMode mode) const;

  Vector context(int arm, double x) const;
  double expected_reward(int arm, double x) const;

  /// d c / d x stacked over arms (the J in the noise bookkeeping).
  Vector context_jacobian(double x) const;

  const std::vector<double>& states() const { return x_; }
  const std::vector<double>& measurements() const { return z_; }
  const SyntheticBanditConfig& config() const { return cfg_; }

private:
  SyntheticBanditConfig cfg_;
  Vector theta_;
  std::vector<Vector> u_;
  std::vector<Vector> b_;
  std::vector<double> x_;
  std::vector<double> z_;
  std::vector<double> noise_;
};

}  // namespace ksurf::bandit
