#pragma once

#include "ksurf/cloudsim/scenario.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ksurf::harness {

/// One batch of scenario runs: scalers x thresholds x seeds over a shared
/// scenario. Thresholds are utilisation fractions once loaded; the JSON may
/// give them in millipods.
struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<cloudsim::ScalerKind> scalers;
  std::vector<double> thresholds;
  std::vector<std::uint64_t> seeds;
  cloudsim::ScenarioConfig scenario;  // scaler, threshold and seed fields are overwritten per run
  std::filesystem::path output_dir = "results";
  bool randomize_order = false;
  std::uint64_t order_seed = 0;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Reads the JSON schema documented in the README. Unknown keys are errors.
/// Relative trace paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Overlay readers shared with the training subcommands; keys follow the
/// `estimator.lstm` and `estimator.ksurf` sections.
void read_lstm_config(const nlohmann::json& j, ksurfnet::LstmConfig& cfg);
void read_ksurf_options(const nlohmann::json& j, estimator::KsurfOptions& opts);

/// Defaults: the flash-crowd scenario with DR and DRKF over seeds 1..20.
ExperimentConfig default_experiment_config();

}  // namespace ksurf::harness
