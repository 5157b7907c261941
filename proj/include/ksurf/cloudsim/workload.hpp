#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ksurf::cloudsim {

/// Multiplies the arrival rate by `amplitude` on ticks [start, start + duration).
struct FlashCrowd {
  long start = 0;
  long duration = 0;
  double amplitude = 1.0;
};

struct WorkloadSpec {
  double poisson_rate = 0.125;  // arrivals per tick
  std::vector<FlashCrowd> flash_crowds;
  std::vector<double> trace_override;  // replayed per-tick arrival counts when non-empty
  long horizon = 5000;

  void validate() const;

  /// Expected arrivals at tick t.
  double rate_at(long t) const;
};

/// Per-tick arrival counts. Deterministic given the seed; a trace override is
/// replayed (and repeated if shorter than the horizon).
std::vector<double> generate_workload(const WorkloadSpec& spec, std::uint64_t seed);

/// Reads `tick,arrivals` (header optional) and returns the arrivals column.
std::vector<double> read_arrival_trace(std::istream& in);
std::vector<double> read_arrival_trace(const std::filesystem::path& path);

}  // namespace ksurf::cloudsim
