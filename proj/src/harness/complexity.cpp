#include "ksurf/harness/complexity.hpp"

#include "ksurf/estimator/ksurf.hpp"
#include "ksurf/surrogate/gp.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <ostream>
#include <random>

namespace ksurf::harness {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

double gp_step_us(std::size_t n, int repeats, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(2);
    x << u(rng), u(rng);
    xs.push_back(x);
    ys.push_back(std::sin(3.0 * x(0)) + 0.1 * u(rng));
  }
  const surrogate::Kernel kernel{0.3, 1.0, 0.01};
  Vector q(2);
  q << 0.1, -0.2;
  double best = std::numeric_limits<double>::infinity();
  volatile double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    const surrogate::GpModel m = surrogate::gp_fit(xs, ys, kernel);
    sink = sink + surrogate::gp_posterior(m, q).mean;
    best = std::min(best, elapsed_us(t0, Clock::now()));
  }
  return best;
}

double ksurf_step_us(std::size_t n, int steps, int repeats, const estimator::KsurfAssets& assets,
                     const estimator::KsurfOptions& opts, const std::vector<double>& signal) {
  double best = std::numeric_limits<double>::infinity();
  volatile double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    estimator::ScalarKsurf f(estimator::SystemModel::random_walk(1.0, 4.0), assets, opts, 4.0);
    for (std::size_t i = 0; i < n; ++i) {
      sink = sink + f.step(signal[i]);
    }
    const auto t0 = Clock::now();
    for (int i = 0; i < steps; ++i) {
      sink = sink + f.step(signal[n + static_cast<std::size_t>(i)]);
    }
    best = std::min(best, elapsed_us(t0, Clock::now()) / steps);
  }
  return best;
}

}  // namespace

std::vector<ComplexityRow> bench_complexity(const ComplexityOptions& opts) {
  if (opts.sizes.empty() || opts.repeats < 1 || opts.ksurf_steps < 1) {
    throw ConfigError("bench-complexity: need sizes, repeats >= 1 and ksurf_steps >= 1");
  }
  std::mt19937_64 rng(opts.seed);
  const std::size_t max_n = *std::max_element(opts.sizes.begin(), opts.sizes.end());
  std::normal_distribution<double> noise(0.0, 2.0);
  std::vector<double> signal;
  double level = 10.0;
  for (std::size_t i = 0; i < max_n + static_cast<std::size_t>(opts.ksurf_steps); ++i) {
    level += 0.1 * noise(rng);
    signal.push_back(level + noise(rng));
  }
  estimator::KsurfOptions kopts;
  kopts.training.epochs = 2;
  const std::vector<double> history(signal.begin(), signal.begin() + std::min<std::size_t>(signal.size(), 400));
  const estimator::KsurfAssets assets = estimator::prepare_scalar_ksurf(history, kopts);

  std::vector<ComplexityRow> rows;
  for (std::size_t n : opts.sizes) {
    if (n == 0) {
      throw ConfigError("bench-complexity: sizes must be positive");
    }
    rows.push_back({"gp", n, gp_step_us(n, opts.repeats, rng)});
    rows.push_back({"ksurf", n, ksurf_step_us(n, opts.ksurf_steps, opts.repeats, assets, kopts, signal)});
  }
  return rows;
}

void write_complexity_csv(std::ostream& out, const std::vector<ComplexityRow>& rows) {
  std::string buf = "method,n,per_step_us\n";
  for (const ComplexityRow& r : rows) {
    buf += fmt::format("{},{},{:.3f}\n", r.method, r.n, r.per_step_us);
  }
  out << buf;
}

}  // namespace ksurf::harness
