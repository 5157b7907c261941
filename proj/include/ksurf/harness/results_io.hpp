#pragma once

#include "ksurf/cloudsim/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ksurf::harness {

/// Identifies one run. Threshold is absent for scalers that ignore it.
struct RunKey {
  cloudsim::ScalerKind scaler = cloudsim::ScalerKind::NA;
  std::optional<double> threshold;
  std::uint64_t seed = 0;

  /// File stem such as `TH_t0.5_seed3` or `DRKF_na_seed3`.
  std::string stem() const;
  static std::optional<RunKey> from_stem(const std::string& stem);

  std::string threshold_label() const;  // "na" when absent

  friend bool operator<(const RunKey& a, const RunKey& b);
  friend bool operator==(const RunKey& a, const RunKey& b);
};

/// Shortest round-trip text for a threshold.
std::string format_threshold(double t);

/// `tick,pods,cpu,mem,queue,latency`
void write_ticks_csv(std::ostream& out, const std::vector<cloudsim::TickMetrics>& ticks);
std::vector<cloudsim::TickMetrics> read_ticks_csv(std::istream& in, const std::string& what = "ticks csv");

/// `round,chosen,oracle_reward,chosen_reward,cum_regret,rho`
void write_regret_csv(std::ostream& out, const bandit::RegretTrace& trace);
/// Final cumulative regret of a regret CSV.
double read_final_regret(std::istream& in, const std::string& what = "regret csv");

/// Writes `<stem>.ticks.csv` and, for bandit runs, `<stem>.regret.csv`.
void write_run(const std::filesystem::path& dir, const RunKey& key, const cloudsim::ScenarioResult& result);

struct StoredRun {
  RunKey key;
  std::vector<cloudsim::TickMetrics> ticks;
  std::optional<double> cum_regret;
};

/// Every `*.ticks.csv` in `dir` (not recursive), sorted by key.
std::vector<StoredRun> load_runs(const std::filesystem::path& dir);

}  // namespace ksurf::harness
