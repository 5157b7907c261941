#include "ksurf/estimator/ksurf.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ksurf;
using namespace ksurf::estimator;

namespace {

Vector v1(double v) { return Vector::Constant(1, v); }

struct LinearGaussianTrace {
  std::vector<double> truth;
  std::vector<double> z;
};

LinearGaussianTrace random_walk_trace(int n, double q, double r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> w(0.0, std::sqrt(q));
  std::normal_distribution<double> u(0.0, std::sqrt(r));
  LinearGaussianTrace t;
  double x = 10.0;
  for (int k = 0; k < n; ++k) {
    x += w(rng);
    t.truth.push_back(x);
    t.z.push_back(x + u(rng));
  }
  return t;
}

}  // namespace

TEST_CASE("measurement window keeps the newest m entries in order") {
  MeasurementWindow w(3);
  for (int i = 0; i < 5; ++i) w.push(v1(i));
  CHECK(w.size() == 3);
  CHECK(w.entries().front()(0) == 2.0);
  CHECK(w.back()(0) == 4.0);
  CHECK_THROWS_AS(w.push(Vector::Zero(2)), ConfigError);
  CHECK_THROWS_AS(MeasurementWindow(0), ConfigError);
}

TEST_CASE("noise-free constant signal converges by step 50") {
  const auto model = SystemModel::random_walk(0.01, 0.01);
  const auto net = AttentionNetwork::identity(AttentionConfig{}, 1);
  const auto basis = PcaBasis::identity(1);
  MeasurementWindow window(8);
  StateEstimate s = StateEstimate::identity_prior(1);
  for (int k = 0; k < 50; ++k) {
    window.push(v1(4.2));
    s = ksurf_step(window, s, model, net, basis);
  }
  CHECK(std::abs(s.x(0) - 4.2) < 1e-6);
  CHECK(s.step == 50);
}

TEST_CASE("disabled attention reproduces the plain filter exactly") {
  const auto model = SystemModel::random_walk(0.05, 1.0);
  AttentionConfig off;
  off.enabled = false;
  const AttentionNetwork net(off, 2, 1);
  const auto trace = random_walk_trace(200, 0.05, 1.0, 5);
  MeasurementWindow window(8);
  StateEstimate a = StateEstimate::identity_prior(1);
  StateEstimate b = a;
  const auto basis = PcaBasis::identity(1);
  for (double z : trace.z) {
    window.push(v1(z));
    a = ksurf_step(window, a, model, net, basis);
    b = kf_update(kf_predict(b, model), v1(z), model).estimate;
    REQUIRE(a.x(0) == b.x(0));
    REQUIRE(a.P(0, 0) == b.P(0, 0));
  }
}

TEST_CASE("lift_series builds (value, trailing mean)") {
  const auto lifted = lift_series({1, 2, 3, 4, 5}, 2);
  CHECK(lifted[0](1) == 1.0);
  CHECK(lifted[1](1) == 1.5);
  CHECK(lifted[4](0) == 5.0);
  CHECK(lifted[4](1) == 4.5);
}

TEST_CASE("Ksurf beats raw measurements on a linear-Gaussian trace") {
  const double q = 0.02;
  const double r = 1.0;
  const auto history = random_walk_trace(1500, q, r, 1);
  const auto test = random_walk_trace(1000, q, r, 2);
  for (bool attention : {false, true}) {
    CAPTURE(attention);
    KsurfOptions opts;
    opts.attention.enabled = attention;
    opts.training.epochs = 3;
    const auto assets = prepare_scalar_ksurf(history.z, opts);
    ScalarKsurf filter(SystemModel::random_walk(q, r), assets, opts);
    double mae_filter = 0.0;
    double mae_raw = 0.0;
    for (std::size_t k = 0; k < test.z.size(); ++k) {
      mae_filter += std::abs(filter.step(test.z[k]) - test.truth[k]);
      mae_raw += std::abs(test.z[k] - test.truth[k]);
    }
    CHECK(mae_filter <= mae_raw);
  }
}
