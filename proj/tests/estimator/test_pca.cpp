#include "ksurf/estimator/pca.hpp"

#include "../oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ksurf;
using namespace ksurf::estimator;

namespace {

std::vector<Vector> random_cloud(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Matrix mix = Matrix::NullaryExpr(dim, dim, [&]() { return n01(rng); });
  std::vector<Vector> out;
  for (int i = 0; i < n; ++i) {
    Vector v = Vector::NullaryExpr(dim, [&]() { return n01(rng); });
    out.push_back(mix * v + Vector::LinSpaced(dim, 1.0, 5.0));
  }
  return out;
}

}  // namespace

TEST_CASE("full basis reconstructs losslessly") {
  const auto samples = random_cloud(40, 4, 1);
  const auto basis = fit_pca(samples, 4);
  for (const auto& s : samples) {
    CHECK((basis.reconstruct(basis.project(s)) - s).norm() < 1e-8);
  }
}

TEST_CASE("points on y = x give the diagonal direction") {
  std::vector<Vector> samples;
  for (int i = -5; i <= 5; ++i) {
    Vector v(2);
    v << 0.3 * i, 0.3 * i;
    samples.push_back(v);
  }
  const auto basis = fit_pca(samples, 1);
  CHECK(basis.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(basis.components(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("5-D cloud matches Jacobi eigendecomposition up to sign") {
  const auto samples = random_cloud(200, 5, 7);
  const auto basis = fit_pca(samples, 5);

  Vector mean = Vector::Zero(5);
  for (const auto& s : samples) mean += s;
  mean /= samples.size();
  Matrix cov = Matrix::Zero(5, 5);
  for (const auto& s : samples) cov += (s - mean) * (s - mean).transpose();
  cov /= (samples.size() - 1);
  const auto [vals, vecs] = oracle::jacobi_eigen(cov);
  for (int i = 0; i < 5; ++i) {
    CHECK(basis.explained_variance(i) == doctest::Approx(vals(i)).epsilon(1e-9));
    const double dot = std::abs(basis.components.row(i).dot(vecs.col(i)));
    CHECK(dot == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("components orthonormal, variance ordered, residual non-increasing in k") {
  const auto samples = random_cloud(100, 6, 3);
  double prev_residual = 1e300;
  for (Index k = 0; k <= 6; ++k) {
    const auto basis = fit_pca(samples, k);
    if (k > 0) {
      const Matrix gram = basis.components * basis.components.transpose();
      CHECK((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-8);
    }
    for (Index i = 1; i < k; ++i) {
      CHECK(basis.explained_variance(i) <= basis.explained_variance(i - 1));
    }
    double residual = 0.0;
    for (const auto& s : samples) residual += (basis.reconstruct(basis.project(s)) - s).squaredNorm();
    CHECK(residual <= prev_residual + 1e-9);
    prev_residual = residual;
  }
}

TEST_CASE("zero-variance data gives an empty basis with a warning") {
  std::vector<Vector> samples(5, Vector::Constant(3, 2.5));
  const auto basis = fit_pca(samples, 2);
  CHECK(basis.k() == 0);
  CHECK_FALSE(basis.warning.empty());
  CHECK((basis.reconstruct(Vector::Zero(0)) - samples[0]).norm() == 0.0);
}

TEST_CASE("fit_pca preconditions") {
  CHECK_THROWS_AS(fit_pca({Vector::Ones(2)}, 1), ConfigError);
  CHECK_THROWS_AS(fit_pca({Vector::Ones(2), Vector::Zero(2)}, 3), ConfigError);
}
