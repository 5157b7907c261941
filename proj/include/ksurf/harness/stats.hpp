#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ksurf::harness {

double mean(const std::vector<double>& samples);

/// Sample variance (n - 1 denominator); 0 for fewer than two samples.
double variance(const std::vector<double>& samples);
double stddev(const std::vector<double>& samples);

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest sample. p in (0, 100).
double percentile(std::vector<double> samples, double p);

/// Percentile of each consecutive block of `window` samples. A trailing
/// partial block is dropped.
std::vector<double> windowed_percentile(const std::vector<double>& samples, double p, std::size_t window);

/// Two-sided Student t quantile t_{(1+level)/2, dof}.
double t_quantile(double level, double dof);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// mean +- t * s / sqrt(n) with n - 1 degrees of freedom. Needs n >= 2.
Interval confidence_interval(const std::vector<double>& samples, double level = 0.95);

}  // namespace ksurf::harness
