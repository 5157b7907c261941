#pragma once

#include "ksurf/bandit/feature_map.hpp"
#include "ksurf/bandit/reward_model.hpp"

#include <iosfwd>
#include <vector>

namespace ksurf::bandit {

/// K scaling actions and one context per action.
struct ArmSet {
  std::vector<int> actions;
  std::vector<ContextVector> contexts;

  std::size_t size() const { return contexts.size(); }
  void validate() const;
};

/// Reward in [0, 1] and the noise level it was drawn with.
struct RewardSample {
  double r = 0.0;
  double noise_std = 0.0;

  static RewardSample clipped(double value, double noise_std = 0.0);
};

/// beta_t = 2 log(K t^2), t >= 1.
double beta_schedule(std::size_t arms, std::size_t round);

/// argmax_a mean(c_a) + sqrt(beta) std(c_a); ties go to the lowest index.
std::size_t select_action(const ArmSet& arms, const RewardModel& model, double beta);

/// (tr_JPJ + nu2) / (tr_JHRHJ + nu2).
double rho(double tr_jpj, double tr_jhrhj, double nu2);

/// The EKF context when |rho_prev| <= |rho_min|, otherwise the L-EKF context.
const ContextVector& select_context(double rho_prev, double rho_min, const ContextVector& ekf_ctx,
                                    const ContextVector& lekf_ctx);

struct RegretRound {
  std::size_t round = 0;
  std::size_t chosen = 0;
  double oracle_reward = 0.0;
  double chosen_reward = 0.0;
  double cum_regret = 0.0;
  double rho = 1.0;
  double tr_jpj = 0.0;
  double tr_jhrhj = 0.0;
  double nu2 = 0.0;
};

/// Per-round regret bookkeeping; R_t = sum of (oracle - chosen) expected rewards.
class RegretTrace {
public:
  const RegretRound& record(std::size_t chosen, double oracle_reward, double chosen_reward, double rho = 1.0,
                            double tr_jpj = 0.0, double tr_jhrhj = 0.0, double nu2 = 0.0);

  const std::vector<RegretRound>& rounds() const { return rounds_; }
  std::size_t size() const { return rounds_.size(); }
  double cumulative() const { return rounds_.empty() ? 0.0 : rounds_.back().cum_regret; }

  /// `round,chosen,oracle_reward,chosen_reward,cum_regret,rho`
  void write_csv(std::ostream& out) const;

private:
  std::vector<RegretRound> rounds_;
};

/// Refits the model with (context of `action`, reward) and appends the round.
/// `oracle_reward` and `chosen_expected` are the simulator's true expected rewards.
void observe(RegretTrace& trace, RewardModel& model, const ArmSet& arms, std::size_t action,
             const RewardSample& reward, double oracle_reward, double chosen_expected, double rho = 1.0);

struct RegretBoundReport {
  std::vector<bool> holds;  // per round
  double fraction = 0.0;
};

/// Checks |R_t^KF| <= sqrt(rho_t) |R_t| + tol round by round, with rho_t
/// taken from the filtered trace.
RegretBoundReport regret_bound_check(const RegretTrace& filtered, const RegretTrace& raw, double tol);

}  // namespace ksurf::bandit
