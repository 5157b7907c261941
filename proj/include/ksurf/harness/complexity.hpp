#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ksurf::harness {

struct ComplexityOptions {
  std::vector<std::size_t> sizes{500, 1000, 2000};
  int repeats = 3;        // the fastest repeat is kept
  int ksurf_steps = 500;  // timed Ksurf steps after n warm-up steps
  std::uint64_t seed = 5;
};

struct ComplexityRow {
  std::string method;  // "gp" or "ksurf"
  std::size_t n = 0;
  double per_step_us = 0.0;
};

/// Per-step cost at history size n. A GP step refits on n points and
/// predicts once; a Ksurf step consumes one measurement after n earlier ones.
std::vector<ComplexityRow> bench_complexity(const ComplexityOptions& opts = {});

/// `method,n,per_step_us`
void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows);

}  // namespace ksurf::harness
