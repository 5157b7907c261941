#pragma once

#include "ksurf/common/trace.hpp"

#include <cmath>
#include <random>

namespace fixtures {

/// Scalar random walk x_k = x_{k-1} + w, z_k = x_k + v, with truth column.
inline ksurf::Trace random_walk_trace(std::size_t n, double q, double r, std::uint64_t seed, double x0 = 10.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> w(0.0, std::sqrt(q));
  std::normal_distribution<double> v(0.0, std::sqrt(r));
  ksurf::Trace t;
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    x += w(rng);
    t.t.push_back(static_cast<double>(k));
    t.truth.push_back(ksurf::Vector::Constant(1, x));
    t.values.push_back(ksurf::Vector::Constant(1, x + v(rng)));
  }
  return t;
}

}  // namespace fixtures
