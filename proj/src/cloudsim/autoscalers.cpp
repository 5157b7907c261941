#include "ksurf/cloudsim/autoscalers.hpp"

#include "ksurf/harness/stats.hpp"

#include <algorithm>
#include <cmath>

namespace ksurf::cloudsim {

const char* to_string(ScalerKind k) {
  switch (k) {
    case ScalerKind::DR:
      return "DR";
    case ScalerKind::DRKF:
      return "DRKF";
    case ScalerKind::DRRQ:
      return "DRRQ";
    case ScalerKind::KF:
      return "KF";
    case ScalerKind::TH:
      return "TH";
    case ScalerKind::NA:
      return "NA";
  }
  return "?";
}

ScalerKind parse_scaler(const std::string& name) {
  for (ScalerKind k : {ScalerKind::DR, ScalerKind::DRKF, ScalerKind::DRRQ, ScalerKind::KF, ScalerKind::TH,
                       ScalerKind::NA}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ConfigError("unknown scaler '" + name + "' (expected DR, DRKF, DRRQ, KF, TH or NA)");
}

bool is_bandit(ScalerKind k) { return k == ScalerKind::DR || k == ScalerKind::DRKF || k == ScalerKind::DRRQ; }

int threshold_rule(double utilisation, int pods, double threshold, int step) {
  if (!(threshold > 0.0)) {
    throw ConfigError("threshold must be > 0");
  }
  if (utilisation > threshold) {
    return pods + step;
  }
  if (utilisation < 0.5 * threshold) {
    return pods - step;
  }
  return pods;
}

ThresholdScaler::ThresholdScaler(double threshold, int step, std::unique_ptr<estimator::ScalarKsurf> filter,
                                 int sync_period)
    : threshold_(threshold), step_(step), filter_(std::move(filter)), sync_period_(sync_period) {
  if (!(threshold > 0.0)) {
    throw ConfigError("threshold must be > 0");
  }
  if (step < 1) {
    throw ConfigError("threshold scaler step must be >= 1");
  }
  if (sync_period < 1) {
    throw ConfigError("threshold scaler sync period must be >= 1");
  }
}

ScalingAction ThresholdScaler::decide(const ClusterState& state) {
  if (state.tick % sync_period_ != 0 || window_count_ == 0) {
    return {state.pods};
  }
  signal_ = filter_ ? window_sum_ : window_sum_ / window_count_;
  window_sum_ = 0.0;
  window_count_ = 0;
  return {threshold_rule(*signal_, state.pods, threshold_, step_)};
}

void ThresholdScaler::observe(const Observation& obs) {
  if (filter_) {
    window_sum_ = filter_->step(obs.cpu);
  } else {
    window_sum_ += obs.cpu;
  }
  ++window_count_;
}

void BanditSettings::validate() const {
  if (decision_interval < 1) {
    throw ConfigError("bandit: decision_interval must be >= 1");
  }
  if (!(slo_ms > 0.0) || latency_weight < 0.0 || cost_weight < 0.0) {
    throw ConfigError("bandit: slo must be positive and weights non-negative");
  }
  if (!(beta_scale >= 0.0)) {
    throw ConfigError("bandit: beta_scale must be >= 0");
  }
  kernel.validate();
}

Vector arm_features(double load_estimate, int pods, const ClusterConfig& cluster, const LatencyModel& lm) {
  Vector f(2);
  f << std::clamp(load_estimate / (pods * lm.service_rate), 0.0, 2.0),
      static_cast<double>(pods) / static_cast<double>(cluster.max_pods);
  return f;
}

double autoscaling_reward(double p95_ms, int pods, const BanditSettings& s, const ClusterConfig& cluster) {
  const double r = s.latency_weight * (1.0 - p95_ms / s.slo_ms) +
                   s.cost_weight * (1.0 - static_cast<double>(pods) / static_cast<double>(cluster.max_pods));
  return std::clamp(r, 0.0, 1.0);
}

BanditScaler::BanditScaler(ScalerKind kind, BanditSettings settings, ClusterConfig cluster, LatencyModel latency,
                           WorkloadSpec workload, std::unique_ptr<estimator::ScalarKsurf> ekf,
                           std::unique_ptr<estimator::ScalarKsurf> lekf)
    : kind_(kind),
      s_(settings),
      cluster_(cluster),
      latency_(latency),
      workload_(std::move(workload)),
      ekf_(std::move(ekf)),
      lekf_(std::move(lekf)),
      psi_(2),
      model_(settings.kernel, settings.history_cap) {
  if (!is_bandit(kind)) {
    throw ConfigError(std::string("bandit scaler cannot run as ") + to_string(kind));
  }
  s_.validate();
  cluster_.validate();
  if (kind != ScalerKind::DR && !ekf_) {
    throw ConfigError("DRKF and DRRQ need a Ksurf filter");
  }
  if (kind == ScalerKind::DRRQ && !lekf_) {
    throw ConfigError("DRRQ needs a learned-noise filter");
  }
}

double BanditScaler::expected_reward(int pods, double rate) const {
  const double p95 = latency_.expected(pods, rate, 0.0, cluster_.max_pods) + 1.645 * latency_.noise_std;
  return autoscaling_reward(p95, pods, s_, cluster_);
}

double BanditScaler::noise_jacobian(int pods) const {
  return 1.0 / (pods * latency_.service_rate) / psi_.stddev()(0) / (3.0 * std::sqrt(2.0));
}

ScalingAction BanditScaler::decide(const ClusterState& state) {
  tick_ = state.tick;
  if (target_ == 0) {
    target_ = state.pods;
  }
  if (tick_ % s_.decision_interval != 0 || !raw_) {
    return {target_};
  }

  if (pending_context_ && !window_latency_.empty()) {
    const double p95 = harness::percentile(window_latency_, 95.0);
    const double r = autoscaling_reward(p95, target_, s_, cluster_);
    residuals_.add(r - pending_prediction_);
    model_.observe(*pending_context_, r);
  }
  window_latency_.clear();

  const double nu2 = residuals_.variance();
  double tr_jpj = 1.0;
  double tr_jrj = 1.0;
  double rho_now = 1.0;
  if (ekf_ && ekf_x_) {
    const double J = noise_jacobian(state.pods);
    tr_jpj = J * J * ekf_->state().P(0, 0);
    tr_jrj = J * J * ekf_->model().R(0, 0);
    rho_now = bandit::rho(tr_jpj, tr_jrj, nu2);
  }

  std::vector<Vector> raw_features;
  auto features_for = [&](double estimate) {
    std::vector<Vector> f;
    for (int c = cluster_.min_pods; c <= cluster_.max_pods; ++c) {
      f.push_back(arm_features(estimate, c, cluster_, latency_));
    }
    return f;
  };

  double estimate = *raw_;
  bandit::ContextSource source = bandit::ContextSource::GpState;
  if (kind_ == ScalerKind::DRKF) {
    estimate = ekf_x_.value_or(*raw_);
    source = bandit::ContextSource::Ekf;
  } else if (kind_ == ScalerKind::DRRQ) {
    const bandit::ContextVector ekf_ctx{Vector::Zero(1), bandit::ContextSource::Ekf};
    const bandit::ContextVector lekf_ctx{Vector::Zero(1), bandit::ContextSource::LEkf};
    source = bandit::select_context(rho_prev_, s_.rho_min, ekf_ctx, lekf_ctx).source;
    estimate = source == bandit::ContextSource::Ekf ? ekf_x_.value_or(*raw_) : lekf_x_.value_or(*raw_);
  }
  rho_prev_ = rho_now;
  last_estimate_ = estimate;
  estimate = std::max(0.0, estimate) + queue_ / s_.decision_interval;

  raw_features = features_for(estimate);
  for (const Vector& f : raw_features) {
    psi_.update(f);
  }
  bandit::ArmSet arms;
  for (std::size_t a = 0; a < raw_features.size(); ++a) {
    arms.actions.push_back(cluster_.min_pods + static_cast<int>(a));
    arms.contexts.push_back(psi_(raw_features[a], source));
  }
  const double beta = s_.beta_scale * bandit::beta_schedule(arms.size(), trace_.size() + 1);
  const std::size_t chosen = bandit::select_action(arms, model_, beta);
  target_ = arms.actions[chosen];
  pending_context_ = arms.contexts[chosen].c;
  pending_prediction_ = model_.predict(*pending_context_).mean;

  const double rate = workload_.rate_at(tick_);
  double oracle = 0.0;
  for (int c = cluster_.min_pods; c <= cluster_.max_pods; ++c) {
    oracle = std::max(oracle, expected_reward(c, rate));
  }
  trace_.record(chosen, oracle, expected_reward(target_, rate), rho_now, tr_jpj, tr_jrj, nu2);
  return {target_};
}

void BanditScaler::observe(const Observation& obs) {
  raw_ = obs.arrivals;
  queue_ = obs.queue;
  if (ekf_) {
    ekf_x_ = ekf_->step(obs.arrivals);
  }
  if (lekf_) {
    lekf_x_ = lekf_->step(obs.arrivals);
  }
  window_latency_.push_back(obs.latency);
}

}  // namespace ksurf::cloudsim
