#include "ksurf/harness/stats.hpp"
#include "ksurf/common/types.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace ksurf;
using namespace ksurf::harness;

TEST_CASE("percentile of constant samples is the constant") {
  const std::vector<double> xs(37, 4.25);
  for (double p : {0.1, 50.0, 99.9}) CHECK(percentile(xs, p) == 4.25);
}

TEST_CASE("nearest rank on 1..100") {
  std::vector<double> xs(100);
  std::iota(xs.begin(), xs.end(), 1.0);
  std::shuffle(xs.begin(), xs.end(), std::mt19937_64(3));
  CHECK(percentile(xs, 99) == 99.0);
  CHECK(percentile(xs, 50) == 50.0);
  CHECK(percentile(xs, 0.5) == 1.0);
  CHECK(percentile(xs, 99.5) == 100.0);
}

TEST_CASE("normal p99 sits near mean + 2.33 sigma") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(10.0, 2.0);
  std::vector<double> xs(100000);
  for (double& x : xs) x = n(rng);
  CHECK(std::abs(percentile(xs, 99) - 14.66) / 14.66 < 0.02);
}

TEST_CASE("percentile rejects bad input") {
  CHECK_THROWS_AS(percentile({}, 50), ConfigError);
  CHECK_THROWS_AS(percentile({1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(percentile({1.0}, 100.0), ConfigError);
}

TEST_CASE("windowed percentile drops the partial block") {
  const std::vector<double> xs = {1, 2, 3, 10, 20, 30, 7};
  CHECK(windowed_percentile(xs, 50, 3) == std::vector<double>{2.0, 20.0});
  CHECK(windowed_percentile(xs, 50, 8).empty());
  CHECK_THROWS_AS(windowed_percentile(xs, 50, 0), ConfigError);
}

TEST_CASE("moments") {
  const std::vector<double> xs = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(xs) == doctest::Approx(5.0));
  CHECK(variance(xs) == doctest::Approx(32.0 / 7.0));
  CHECK(stddev(xs) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(variance({3.0}) == 0.0);
}

TEST_CASE("t quantiles match the table") {
  CHECK(t_quantile(0.95, 4) == doctest::Approx(2.776).epsilon(2e-4));
  CHECK(t_quantile(0.95, 10) == doctest::Approx(2.228).epsilon(2e-4));
  CHECK(t_quantile(0.99, 20) == doctest::Approx(2.845).epsilon(2e-4));
  CHECK_THROWS_AS(t_quantile(1.0, 4), ConfigError);
}

TEST_CASE("confidence interval on 1..5") {
  const Interval ci = confidence_interval({1, 2, 3, 4, 5});
  const double half = 2.776 * 1.5811 / std::sqrt(5.0);
  CHECK(ci.lower == doctest::Approx(3.0 - half).epsilon(1e-3));
  CHECK(ci.upper == doctest::Approx(3.0 + half).epsilon(1e-3));
}

TEST_CASE("identical samples give a zero-width interval") {
  const Interval ci = confidence_interval({6.5, 6.5, 6.5});
  CHECK(ci.lower == 6.5);
  CHECK(ci.upper == 6.5);
  CHECK_THROWS_AS(confidence_interval({1.0}), ConfigError);
}

TEST_CASE("interval narrows with n at fixed spread") {
  // same sample mean and std at n = 5 and n = 100
  auto scaled = [](int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = i % 2 ? 1.0 : -1.0;
    if (n % 2) xs.back() = 0.0;
    const double m = mean(xs), s = stddev(xs);
    for (double& x : xs) x = 3.0 + (x - m) / s;
    return xs;
  };
  const Interval a = confidence_interval(scaled(5));
  const Interval b = confidence_interval(scaled(100));
  CHECK(b.upper - b.lower < a.upper - a.lower);
}

TEST_CASE("doubling the sample shrinks the interval by about 1/sqrt(2)") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  auto mean_width = [&](int size) {
    double total = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> xs(static_cast<std::size_t>(size));
      for (double& x : xs) x = n(rng);
      const Interval ci = confidence_interval(xs);
      total += ci.upper - ci.lower;
    }
    return total / 200.0;
  };
  const double ratio = mean_width(400) / mean_width(200);
  CHECK(ratio >= 0.6);
  CHECK(ratio <= 0.85);
}
