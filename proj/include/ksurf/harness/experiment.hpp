#pragma once

#include "ksurf/harness/config.hpp"
#include "ksurf/harness/report.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ksurf::harness {

struct RunSpec {
  RunKey key;
  cloudsim::ScenarioConfig config;
};

/// Scalers x seeds, and x thresholds for TH and KF. Sorted by key, or
/// shuffled with `order_seed` when `randomize_order` is set.
std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg);

struct ExperimentResult {
  std::vector<RunMetrics> runs;         // sorted by key
  std::vector<std::string> diagnostics; // "<stem>: <scaler diagnostics>" for runs that have any
};

using ProgressFn = std::function<void(const RunKey& key, std::size_t done, std::size_t total)>;

/// Runs the plan on a thread pool, writing per-run CSVs, `order.csv` and
/// `summary.csv` into the output directory. Estimator assets are prepared
/// once and shared. The first failing run's exception is rethrown after the
/// pool drains.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

}  // namespace ksurf::harness
