#include "ksurf/harness/stats.hpp"

#include "ksurf/common/types.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ksurf::harness {

double mean(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw ConfigError("mean of an empty sample");
  }
  return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double variance(const std::vector<double>& samples) {
  if (samples.size() < 2) {
    return 0.0;
  }
  const double m = mean(samples);
  double ss = 0.0;
  for (double v : samples) {
    ss += (v - m) * (v - m);
  }
  return ss / static_cast<double>(samples.size() - 1);
}

double stddev(const std::vector<double>& samples) { return std::sqrt(variance(samples)); }

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) {
    throw ConfigError("percentile of an empty sample");
  }
  if (!(p > 0.0 && p < 100.0)) {
    throw ConfigError("percentile p must lie in (0, 100)");
  }
  const auto n = static_cast<double>(samples.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(rank - 1), samples.end());
  return samples[rank - 1];
}

std::vector<double> windowed_percentile(const std::vector<double>& samples, double p, std::size_t window) {
  if (window == 0) {
    throw ConfigError("windowed_percentile: window must be >= 1");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i + window <= samples.size(); i += window) {
    out.push_back(percentile(std::vector<double>(samples.begin() + static_cast<std::ptrdiff_t>(i),
                                                 samples.begin() + static_cast<std::ptrdiff_t>(i + window)),
                             p));
  }
  return out;
}

double t_quantile(double level, double dof) {
  if (!(level > 0.0 && level < 1.0) || !(dof > 0.0)) {
    throw ConfigError("t_quantile: level must lie in (0, 1) and dof must be positive");
  }
  const boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.5 + 0.5 * level);
}

Interval confidence_interval(const std::vector<double>& samples, double level) {
  if (samples.size() < 2) {
    throw ConfigError("confidence interval needs at least 2 samples");
  }
  const double m = mean(samples);
  const double half =
      t_quantile(level, static_cast<double>(samples.size() - 1)) * stddev(samples) /
      std::sqrt(static_cast<double>(samples.size()));
  return {m - half, m + half};
}

}  // namespace ksurf::harness
