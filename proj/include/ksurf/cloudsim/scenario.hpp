#pragma once

#include "ksurf/cloudsim/autoscalers.hpp"
#include "ksurf/ksurfnet/lstm.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ksurf::cloudsim {

/// Filters and learned noise used by the KF / DRKF / DRRQ scalers.
struct EstimatorSettings {
  double process_noise = 5.0;          // Q of the arrival-rate random walk; loose enough to follow flash onsets
  double measurement_noise = -1.0;     // R; negative = arrival_noise^2 + poisson_rate
  double cpu_process_noise = 1e-3;     // Q of the utilisation random walk (KF scaler)
  double cpu_measurement_noise = -1.0; // negative = cpu_noise^2
  estimator::KsurfOptions ksurf;
  ksurfnet::LstmConfig lstm;
  long history_ticks = 2000;
  std::uint64_t history_seed = 424242;

  EstimatorSettings();
};

struct ScenarioConfig {
  ScalerKind scaler = ScalerKind::NA;
  double threshold = 0.5;  // utilisation fraction
  int step_size = 1;
  int sync_period = 15;     // ticks between threshold decisions
  WorkloadSpec workload;
  ClusterConfig cluster;
  LatencyModel latency;
  double arrival_noise = 8.0;  // std of the scraped arrival metric
  double cpu_noise = 0.05;     // std of the scraped utilisation metric
  EstimatorSettings estimator;
  BanditSettings bandit;
  std::uint64_t seed = 1;

  void validate() const;
  double arrival_measurement_noise() const;
  double cpu_measurement_noise() const;
};

/// lambda = 20 with bursts x2.5 at [1500, 1800) and x3 at [3500, 3700), 24 pods
/// of mu = 4, starting from 6.
ScenarioConfig flash_crowd_scenario(ScalerKind scaler, std::uint64_t seed);

/// Trained stages shared by every run of a scenario group. They depend on
/// the workload, noise and estimator settings but not on the run seed.
struct ScenarioAssets {
  estimator::KsurfAssets arrivals;  // Ksurf over the arrival metric
  estimator::KsurfAssets cpu;       // Ksurf over the utilisation metric
  ksurfnet::NoiseEstimate learned;  // KsurfNet noise for the arrival filter
  std::vector<double> history;      // measured arrivals the assets were fitted on
};

/// Simulates a history trace from `history_seed` and fits PCA, attention
/// and KsurfNet on it. `with_ksurfnet` skips the LSTM when false.
ScenarioAssets prepare_assets(const ScenarioConfig& cfg, bool with_ksurfnet = true);

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<TickMetrics> ticks;
  std::optional<bandit::RegretTrace> regret;
  std::string diagnostics;  // scaler model state at the end of the run
};

/// The closed loop: workload -> cluster step -> noisy metrics -> scaler.
/// Assets are prepared on the fly when not given.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const ScenarioAssets* assets = nullptr);

/// Builds the scaler a config names.
std::unique_ptr<Autoscaler> make_scaler(const ScenarioConfig& cfg, const ScenarioAssets* assets);

}  // namespace ksurf::cloudsim
