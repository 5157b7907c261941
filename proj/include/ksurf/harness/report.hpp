#pragma once

#include "ksurf/harness/results_io.hpp"
#include "ksurf/harness/stats.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ksurf::harness {

/// Ticks per block when measuring the spread of tail latency.
constexpr std::size_t kTailWindow = 50;

/// mean, sample std, 95% t-interval and nearest-rank p90/p95/p99 of a sample.
/// A single sample gives a zero-width interval.
struct MetricSummary {
  std::string name;
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
  Interval ci;
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
};

MetricSummary summarize(const std::string& name, const std::vector<double>& samples);

/// Scalar outcomes of one run.
struct RunMetrics {
  RunKey key;
  std::size_t ticks = 0;
  double latency_mean = 0.0;
  double latency_std = 0.0;
  double latency_p90 = 0.0;
  double latency_p95 = 0.0;
  double latency_p99 = 0.0;
  double latency_p95_var = 0.0;  // variance of per-block p95 latency
  double latency_p99_var = 0.0;
  double pods_mean = 0.0;
  double pods_var = 0.0;
  double cpu_mean = 0.0;
  double cpu_std = 0.0;
  double mem_mean = 0.0;
  double mem_std = 0.0;
  std::optional<double> cum_regret;
};

RunMetrics run_metrics(const RunKey& key, const std::vector<cloudsim::TickMetrics>& ticks,
                       std::optional<double> cum_regret = std::nullopt);

/// Metric names in column order, and lookup by name (nullopt for a missing regret).
const std::vector<std::string>& run_metric_names();
std::optional<double> metric_value(const RunMetrics& m, const std::string& name);

/// One row per run.
void write_summary_csv(std::ostream& out, const std::vector<RunMetrics>& runs);

struct GroupSummary {
  cloudsim::ScalerKind scaler = cloudsim::ScalerKind::NA;
  std::optional<double> threshold;
  std::vector<MetricSummary> metrics;  // across seeds
};

/// Candidate minus baseline over runs sharing threshold and seed.
/// reduction = (mean_base - mean_cand) / mean_base.
struct PairedComparison {
  cloudsim::ScalerKind baseline = cloudsim::ScalerKind::NA;
  cloudsim::ScalerKind candidate = cloudsim::ScalerKind::NA;
  std::optional<double> threshold;
  std::string metric;
  std::size_t pairs = 0;
  double baseline_mean = 0.0;
  double candidate_mean = 0.0;
  Interval diff_ci;
  std::size_t candidate_lower = 0;
  double reduction = 0.0;
};

PairedComparison compare_paired(cloudsim::ScalerKind baseline, cloudsim::ScalerKind candidate,
                                std::optional<double> threshold, const std::string& metric,
                                const std::vector<double>& base, const std::vector<double>& cand);

struct Report {
  std::vector<GroupSummary> groups;
  std::vector<PairedComparison> paired;
};

/// Groups by scaler x threshold and pairs every two scalers that share a
/// threshold label, the earlier scaler in NA, TH, KF, DR, DRKF, DRRQ order
/// acting as baseline.
Report build_report(const std::vector<RunMetrics>& runs);

/// Loads `dir`, builds the report and writes report_summary.csv and
/// report_paired.csv next to the runs. Throws ConfigError "no results found"
/// when the directory holds no runs.
Report report_directory(const std::filesystem::path& dir);

void write_group_csv(std::ostream& out, const Report& report);
void write_paired_csv(std::ostream& out, const Report& report);

/// Short human-readable digest.
std::string format_report(const Report& report);

}  // namespace ksurf::harness
