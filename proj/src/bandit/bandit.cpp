#include "ksurf/bandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ksurf::bandit {

void ArmSet::validate() const {
  if (contexts.empty()) {
    throw ConfigError("arm set must contain at least one arm");
  }
  if (!actions.empty() && actions.size() != contexts.size()) {
    throw ConfigError("arm set: one action per context required");
  }
  const Index d = contexts.front().c.size();
  for (const ContextVector& c : contexts) {
    if (c.c.size() != d) {
      throw ConfigError("arm set: contexts have different dimensions");
    }
    if (!c.c.allFinite()) {
      throw NumericalError("arm set: non-finite context");
    }
  }
}

RewardSample RewardSample::clipped(double value, double noise_std) {
  return {std::clamp(value, 0.0, 1.0), noise_std};
}

double beta_schedule(std::size_t arms, std::size_t round) {
  const double t = static_cast<double>(std::max<std::size_t>(round, 1));
  return 2.0 * std::log(static_cast<double>(std::max<std::size_t>(arms, 1)) * t * t);
}

std::size_t select_action(const ArmSet& arms, const RewardModel& model, double beta) {
  arms.validate();
  if (beta < 0.0) {
    throw ConfigError("exploration weight beta must be >= 0");
  }
  const double w = std::sqrt(beta);
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const surrogate::Posterior p = model.predict(arms.contexts[a].c);
    const double score = p.mean + w * std::sqrt(std::max(0.0, p.variance));
    if (a == 0 || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return best;
}

double rho(double tr_jpj, double tr_jhrhj, double nu2) {
  const double den = tr_jhrhj + nu2;
  if (!(den > 0.0)) {
    throw NumericalError("rho: non-positive denominator tr(J H^-1 R H^-T J^T) + nu^2");
  }
  return (tr_jpj + nu2) / den;
}

const ContextVector& select_context(double rho_prev, double rho_min, const ContextVector& ekf_ctx,
                                    const ContextVector& lekf_ctx) {
  return std::abs(rho_prev) <= std::abs(rho_min) ? ekf_ctx : lekf_ctx;
}

const RegretRound& RegretTrace::record(std::size_t chosen, double oracle_reward, double chosen_reward, double rho,
                                       double tr_jpj, double tr_jhrhj, double nu2) {
  RegretRound r;
  r.round = rounds_.size() + 1;
  r.chosen = chosen;
  r.oracle_reward = oracle_reward;
  r.chosen_reward = chosen_reward;
  r.cum_regret = cumulative() + (oracle_reward - chosen_reward);
  r.rho = rho;
  r.tr_jpj = tr_jpj;
  r.tr_jhrhj = tr_jhrhj;
  r.nu2 = nu2;
  rounds_.push_back(r);
  return rounds_.back();
}

void RegretTrace::write_csv(std::ostream& out) const {
  out << "round,chosen,oracle_reward,chosen_reward,cum_regret,rho\n";
  for (const RegretRound& r : rounds_) {
    out << r.round << ',' << r.chosen << ',' << r.oracle_reward << ',' << r.chosen_reward << ',' << r.cum_regret
        << ',' << r.rho << '\n';
  }
}

void observe(RegretTrace& trace, RewardModel& model, const ArmSet& arms, std::size_t action,
             const RewardSample& reward, double oracle_reward, double chosen_expected, double rho) {
  if (action >= arms.size()) {
    throw ConfigError("observe: action index out of range");
  }
  model.observe(arms.contexts[action].c, reward.r);
  trace.record(action, oracle_reward, chosen_expected, rho);
}

RegretBoundReport regret_bound_check(const RegretTrace& filtered, const RegretTrace& raw, double tol) {
  if (filtered.size() != raw.size()) {
    throw ConfigError("regret_bound_check: traces have different lengths");
  }
  RegretBoundReport rep;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < filtered.size(); ++i) {
    const RegretRound& f = filtered.rounds()[i];
    const bool h = std::abs(f.cum_regret) <= std::sqrt(std::abs(f.rho)) * std::abs(raw.rounds()[i].cum_regret) + tol;
    rep.holds.push_back(h);
    ok += h;
  }
  rep.fraction = filtered.size() ? static_cast<double>(ok) / static_cast<double>(filtered.size()) : 1.0;
  return rep;
}

}  // namespace ksurf::bandit
