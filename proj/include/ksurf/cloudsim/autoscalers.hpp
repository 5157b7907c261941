#pragma once

#include "ksurf/bandit/bandit.hpp"
#include "ksurf/cloudsim/cluster.hpp"
#include "ksurf/cloudsim/workload.hpp"
#include "ksurf/estimator/ksurf.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ksurf::cloudsim {

enum class ScalerKind { DR, DRKF, DRRQ, KF, TH, NA };

const char* to_string(ScalerKind k);
ScalerKind parse_scaler(const std::string& name);
bool is_bandit(ScalerKind k);

/// What a scaler sees after each tick: metrics with scrape noise added.
struct Observation {
  long tick = 0;
  int pods = 0;
  double cpu = 0.0;
  double arrivals = 0.0;
  double latency = 0.0;
  double queue = 0.0;
};

class Autoscaler {
public:
  virtual ~Autoscaler() = default;

  /// Called once before every tick.
  virtual ScalingAction decide(const ClusterState& state) = 0;

  /// Called once after every tick.
  virtual void observe(const Observation& obs) = 0;

  virtual const bandit::RegretTrace* regret() const { return nullptr; }

  /// Free-form model state for debugging; empty when there is none.
  virtual std::string diagnostics() const { return {}; }
};

/// Holds the current pod count forever.
class NoActionScaler : public Autoscaler {
public:
  ScalingAction decide(const ClusterState& state) override { return {state.pods}; }
  void observe(const Observation&) override {}
};

/// Scale up by `step` above the threshold, down below half of it, hold otherwise.
int threshold_rule(double utilisation, int pods, double threshold, int step);

/// TH when `filter` is null, KF (rule applied to filtered utilisation) otherwise.
/// Decides every `sync_period` ticks. TH acts on the mean utilisation seen
/// since the previous decision, KF on the latest filtered value.
class ThresholdScaler : public Autoscaler {
public:
  ThresholdScaler(double threshold, int step, std::unique_ptr<estimator::ScalarKsurf> filter = nullptr,
                  int sync_period = 1);

  ScalingAction decide(const ClusterState& state) override;
  void observe(const Observation& obs) override;

  /// The utilisation the rule last acted on.
  std::optional<double> signal() const { return signal_; }

private:
  double threshold_;
  int step_;
  std::unique_ptr<estimator::ScalarKsurf> filter_;
  int sync_period_;
  std::optional<double> signal_;
  double window_sum_ = 0.0;
  int window_count_ = 0;
};

struct BanditSettings {
  int decision_interval = 10;
  double slo_ms = 1000.0;
  double latency_weight = 0.7;
  double cost_weight = 0.3;
  surrogate::Kernel kernel{0.3, 0.2, 0.01};  // over psi features, which live in the unit ball
  std::size_t history_cap = 512;
  double beta_scale = 1.0;
  double rho_min = 0.1;

  void validate() const;
};

/// Arm features before psi: (predicted utilisation capped at 2, pod fraction).
/// `load_estimate` should already include the backlog to drain.
Vector arm_features(double load_estimate, int pods, const ClusterConfig& cluster, const LatencyModel& lm);

/// clip(w_l (1 - p95 / slo) + w_c (1 - pods / max), 0, 1).
double autoscaling_reward(double p95_ms, int pods, const BanditSettings& s, const ClusterConfig& cluster);

/// Contextual-bandit scaler. Arms are absolute pod counts. The load
/// estimate behind the contexts comes from the raw arrival metric (DR), a
/// Ksurf filter (DRKF), or the Ksurf / learned-noise filter pair chosen by
/// the rho heuristic (DRRQ). Regret is measured against the true rate.
class BanditScaler : public Autoscaler {
public:
  BanditScaler(ScalerKind kind, BanditSettings settings, ClusterConfig cluster, LatencyModel latency,
               WorkloadSpec workload, std::unique_ptr<estimator::ScalarKsurf> ekf,
               std::unique_ptr<estimator::ScalarKsurf> lekf);

  ScalingAction decide(const ClusterState& state) override;
  void observe(const Observation& obs) override;
  const bandit::RegretTrace* regret() const override { return &trace_; }
  std::string diagnostics() const override { return model_.gp().diagnostics(); }

  /// The load estimate used at the last decision.
  double last_estimate() const { return last_estimate_; }

private:
  double expected_reward(int pods, double rate) const;
  double noise_jacobian(int pods) const;

  ScalerKind kind_;
  BanditSettings s_;
  ClusterConfig cluster_;
  LatencyModel latency_;
  WorkloadSpec workload_;
  std::unique_ptr<estimator::ScalarKsurf> ekf_;
  std::unique_ptr<estimator::ScalarKsurf> lekf_;
  bandit::FeatureMap psi_;
  bandit::GpRewardModel model_;
  bandit::RegretTrace trace_;
  bandit::RunningVariance residuals_;

  std::optional<double> raw_;
  std::optional<double> ekf_x_;
  std::optional<double> lekf_x_;
  double queue_ = 0.0;
  std::vector<double> window_latency_;
  std::optional<Vector> pending_context_;
  double pending_prediction_ = 0.0;
  int target_ = 0;
  long tick_ = 0;
  double rho_prev_ = 1.0;
  double last_estimate_ = 0.0;
};

}  // namespace ksurf::cloudsim
