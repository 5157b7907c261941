#include "ksurf/surrogate/gp.hpp"

#include "../oracles/oracles.hpp"

#include <doctest.h>

#include <random>

using namespace ksurf;
using namespace ksurf::surrogate;

namespace {

Vector v(std::initializer_list<double> xs) {
  Vector out(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) out(i++) = x;
  return out;
}

std::vector<Vector> random_points(int n, Index d, std::mt19937_64& rng, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x(j) = u(rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("empty model returns the prior") {
  Kernel k;
  k.signal_variance = 2.5;
  const GpModel m = gp_fit({}, {}, k);
  const Posterior p = gp_posterior(m, v({3.0, -1.0}));
  CHECK(p.mean == 0.0);
  CHECK(p.variance == 2.5);
}

TEST_CASE("noiseless single point is interpolated") {
  Kernel k;
  k.noise_variance = 0.0;
  const GpModel m = gp_fit({v({0.3})}, {1.7}, k);
  const Posterior p = gp_posterior(m, v({0.3}));
  CHECK(p.mean == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(p.variance <= 1e-8);
}

TEST_CASE("three points match the direct-inverse values") {
  const GpModel m = gp_fit({v({0.0}), v({1.0}), v({2.5})}, {0.5, -0.2, 1.1}, Kernel{});
  const Posterior p = gp_posterior(m, v({1.7}));
  CHECK(std::abs(p.mean - 0.25152271116370534) < 1e-8);
  CHECK(std::abs(p.variance - 0.10598143508967484) < 1e-8);
}

TEST_CASE("five 2-D points match the direct-inverse values") {
  Kernel k{0.8, 1.5, 0.05};
  const GpModel m = gp_fit({v({0.1, 0.2}), v({0.9, -0.4}), v({-0.5, 0.6}), v({1.3, 1.1}), v({0.0, -1.0})},
                           {0.3, 0.8, -0.1, 0.45, 0.05}, k);
  const Posterior p = gp_posterior(m, v({0.4, 0.1}));
  CHECK(std::abs(p.mean - 0.5346807706496673) < 1e-8);
  CHECK(std::abs(p.variance - 0.09779540931793496) < 1e-8);
}

TEST_CASE("50 random points agree with a Gauss-Jordan solve") {
  std::mt19937_64 rng(21);
  const auto X = random_points(50, 3, rng);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) y.push_back(n(rng));
  Kernel k{1.3, 1.0, 0.01};
  const GpModel m = gp_fit(X, y, k);
  for (const Vector& q : random_points(20, 3, rng)) {
    const Posterior p = gp_posterior(m, q);
    const auto [mean, var] = oracle::gp_direct(X, y, q, k.lengthscale, k.signal_variance, k.noise_variance);
    CHECK(std::abs(p.mean - mean) < 1e-8);
    CHECK(std::abs(p.variance - std::max(0.0, var)) < 1e-8);
  }
}

TEST_CASE("far queries revert to the prior") {
  std::mt19937_64 rng(2);
  const auto X = random_points(10, 2, rng);
  const GpModel m = gp_fit(X, std::vector<double>(10, 3.0), Kernel{});
  const Posterior p = gp_posterior(m, v({100.0, -100.0}));
  CHECK(std::abs(p.mean) < 1e-6);
  CHECK(std::abs(p.variance - 1.0) < 1e-6);
}

TEST_CASE("posterior variance stays within [0, sf2 + sn2]") {
  std::mt19937_64 rng(8);
  Kernel k{0.7, 1.2, 0.03};
  const auto X = random_points(30, 2, rng);
  const GpModel m = gp_fit(X, std::vector<double>(30, 0.5), k);
  for (const Vector& q : random_points(200, 2, rng, 4.0)) {
    const Posterior p = gp_posterior(m, q);
    CHECK(p.variance >= 0.0);
    CHECK(p.variance <= k.signal_variance + k.noise_variance);
  }
}

TEST_CASE("adding a point never increases the noise-free posterior variance") {
  std::mt19937_64 rng(13);
  Kernel k{1.0, 1.0, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    auto X = random_points(8, 2, rng, 3.0);
    std::vector<double> y(X.size(), 0.0);
    const auto queries = random_points(10, 2, rng, 3.0);
    const GpModel before = gp_fit(X, y, k);
    X.push_back(random_points(1, 2, rng, 3.0).front());
    y.push_back(1.0);
    const GpModel after = gp_fit(X, y, k);
    for (const Vector& q : queries) {
      CHECK(gp_posterior(after, q).variance <= gp_posterior(before, q).variance + 1e-9);
    }
  }
}

TEST_CASE("duplicate noiseless points fall back to jitter") {
  Kernel k{1.0, 1.0, 0.0};
  const GpModel m = gp_fit({v({1.0}), v({1.0}), v({1.0})}, {2.0, 2.0, 2.0}, k);
  CHECK(m.jitter() > 0.0);
  CHECK(gp_posterior(m, v({1.0})).mean == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.diagnostics().find("jitter=") != std::string::npos);
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(gp_fit({v({1.0})}, {}, Kernel{}), ConfigError);
  CHECK_THROWS_AS(gp_fit({v({1.0}), v({1.0, 2.0})}, {1.0, 2.0}, Kernel{}), ConfigError);
  CHECK_THROWS_AS(gp_fit({v({std::nan("")})}, {1.0}, Kernel{}), ConfigError);
  CHECK_THROWS_AS(gp_fit({}, {}, Kernel{-1.0, 1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(gp_fit({}, {}, Kernel{1.0, 1.0, -0.1}), ConfigError);
}

TEST_CASE("extending one point at a time matches a full fit") {
  std::mt19937_64 rng(21);
  const Kernel k{0.4, 0.7, 0.02};
  const auto xs = random_points(40, 2, rng, 1.0);
  std::normal_distribution<double> n01;
  std::vector<double> ys;
  GpModel grown = gp_fit({}, {}, k);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys.push_back(n01(rng));
    // shift every target, as a re-centred history does
    Vector targets(static_cast<Index>(ys.size()));
    for (std::size_t j = 0; j < ys.size(); ++j) targets(static_cast<Index>(j)) = ys[j] - 0.01 * static_cast<double>(i);
    grown = gp_extend(std::move(grown), xs[i], targets);
  }
  std::vector<double> final_targets;
  for (double y : ys) final_targets.push_back(y - 0.01 * static_cast<double>(xs.size() - 1));
  const GpModel full = gp_fit(xs, final_targets, k);
  REQUIRE(grown.size() == full.size());
  for (const Vector& q : random_points(10, 2, rng, 1.2)) {
    const Posterior a = gp_posterior(grown, q);
    const Posterior b = gp_posterior(full, q);
    CHECK(std::abs(a.mean - b.mean) < 1e-9);
    CHECK(std::abs(a.variance - b.variance) < 1e-9);
  }
}

TEST_CASE("extend rejects a wrong target count") {
  GpModel m = gp_fit({v({0.0})}, {1.0}, Kernel{});
  CHECK_THROWS_AS(gp_extend(m, v({1.0}), v({1.0})), ConfigError);
}
