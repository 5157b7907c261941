#include "ksurf/cloudsim/workload.hpp"
#include "ksurf/common/types.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace ksurf;
using namespace ksurf::cloudsim;

namespace {

double mean_over(const std::vector<double>& xs, std::size_t from, std::size_t to) {
  return std::accumulate(xs.begin() + static_cast<std::ptrdiff_t>(from), xs.begin() + static_cast<std::ptrdiff_t>(to),
                         0.0) /
         static_cast<double>(to - from);
}

}  // namespace

TEST_CASE("zero rate gives no arrivals") {
  WorkloadSpec spec;
  spec.poisson_rate = 0.0;
  spec.horizon = 1000;
  const auto a = generate_workload(spec, 3);
  REQUIRE(a.size() == 1000);
  for (double x : a) CHECK(x == 0.0);
}

TEST_CASE("poisson mean is within three standard errors") {
  WorkloadSpec spec;
  spec.poisson_rate = 0.125;
  spec.horizon = 100000;
  const auto a = generate_workload(spec, 17);
  const double m = mean_over(a, 0, a.size());
  const double se = std::sqrt(0.125 / static_cast<double>(a.size()));
  CHECK(std::abs(m - 0.125) < 3.0 * se);
}

TEST_CASE("flash window multiplies the windowed mean") {
  WorkloadSpec spec;
  spec.poisson_rate = 5.0;
  spec.horizon = 2000;
  spec.flash_crowds = {{100, 100, 10.0}};
  const auto a = generate_workload(spec, 5);
  const double inside = mean_over(a, 100, 200);
  std::vector<double> outside(a.begin(), a.begin() + 100);
  outside.insert(outside.end(), a.begin() + 200, a.end());
  const double out_mean = mean_over(outside, 0, outside.size());
  // two-sample comparison: ratio within a few standard errors of 10
  const double se_in = std::sqrt(50.0 / 100.0);
  CHECK(std::abs(inside - 10.0 * out_mean) < 4.0 * se_in + 10.0 * 4.0 * std::sqrt(5.0 / 1900.0));
  CHECK(spec.rate_at(150) == doctest::Approx(50.0));
  CHECK(spec.rate_at(200) == doctest::Approx(5.0));
}

TEST_CASE("same seed, same arrivals; other seed differs") {
  WorkloadSpec spec;
  spec.poisson_rate = 3.0;
  spec.horizon = 500;
  CHECK(generate_workload(spec, 9) == generate_workload(spec, 9));
  CHECK(generate_workload(spec, 9) != generate_workload(spec, 10));
}

TEST_CASE("trace override is replayed and repeated") {
  WorkloadSpec spec;
  spec.horizon = 5;
  spec.trace_override = {1.0, 2.0};
  CHECK(generate_workload(spec, 1) == std::vector<double>{1.0, 2.0, 1.0, 2.0, 1.0});
}

TEST_CASE("invalid workloads are rejected") {
  WorkloadSpec spec;
  spec.poisson_rate = -1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.poisson_rate = 1.0;
  spec.flash_crowds = {{4990, 20, 2.0}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.flash_crowds = {{10, 20, 0.5}};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("arrival trace reader accepts a header") {
  std::istringstream in("tick,arrivals\n0,3\n1,0\n2,7.5\n");
  CHECK(read_arrival_trace(in) == std::vector<double>{3.0, 0.0, 7.5});
  std::istringstream bad("0,3\n1,-2\n");
  CHECK_THROWS_AS(read_arrival_trace(bad), ConfigError);
}
