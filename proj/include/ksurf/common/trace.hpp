#pragma once

#include "ksurf/common/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ksurf {

/// A measurement trace: one row per step.
///
/// CSV layout is `t,value[,value...]`. Columns whose header starts with
/// `truth` carry optional ground-truth state values and are kept separate.
struct Trace {
  std::vector<double> t;
  std::vector<Vector> values;
  std::vector<Vector> truth;  // empty when the trace has no ground truth

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  bool has_truth() const { return !truth.empty(); }
  Index dim() const { return values.empty() ? 0 : values.front().size(); }

  /// Contiguous sub-range [begin, end).
  Trace slice(std::size_t begin, std::size_t end) const;
};

Trace read_trace_csv(std::istream& in);
Trace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(std::ostream& out, const Trace& trace);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);

/// Scalar random walk x_k = x_{k-1} + w_k, z_k = x_k + v_k with
/// w ~ N(0, q), v ~ N(0, r). Carries the truth column.
Trace synthetic_random_walk(std::size_t n, double q, double r, std::uint64_t seed, double x0 = 10.0);

}  // namespace ksurf
