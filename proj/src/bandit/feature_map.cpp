#include "ksurf/bandit/feature_map.hpp"

#include <cmath>

namespace ksurf::bandit {

const char* to_string(ContextSource s) {
  switch (s) {
    case ContextSource::RawObservation:
      return "raw";
    case ContextSource::Ekf:
      return "ekf";
    case ContextSource::LEkf:
      return "lekf";
    case ContextSource::GpState:
      return "gp";
  }
  return "?";
}

void RunningVariance::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

FeatureMap::FeatureMap(Index dim) : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {
  if (dim < 1) {
    throw ConfigError("feature map dimension must be >= 1");
  }
}

FeatureMap FeatureMap::frozen(Vector mean, Vector stddev) {
  if (mean.size() != stddev.size() || mean.size() < 1) {
    throw ConfigError("frozen feature map: mean and stddev sizes differ");
  }
  if ((stddev.array() <= 0.0).any() || !stddev.allFinite() || !mean.allFinite()) {
    throw ConfigError("frozen feature map: stddev must be positive and finite");
  }
  FeatureMap f(mean.size());
  f.mean_ = std::move(mean);
  f.fixed_std_ = std::move(stddev);
  f.frozen_ = true;
  return f;
}

void FeatureMap::update(const Vector& x) {
  if (frozen_) {
    return;
  }
  if (x.size() != dim()) {
    throw ConfigError("feature map: state has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(dim()));
  }
  if (!x.allFinite()) {
    return;
  }
  ++n_;
  const Vector d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d.cwiseProduct(x - mean_);
}

Vector FeatureMap::stddev() const {
  if (frozen_) {
    return fixed_std_;
  }
  Vector s = Vector::Ones(dim());
  if (n_ > 1) {
    for (Index i = 0; i < dim(); ++i) {
      const double v = std::sqrt(m2_(i) / static_cast<double>(n_ - 1));
      if (v > 1e-12) {
        s(i) = v;
      }
    }
  }
  return s;
}

ContextVector FeatureMap::operator()(const Vector& x, ContextSource source) const {
  if (x.size() != dim()) {
    throw ConfigError("feature map: state has dimension " + std::to_string(x.size()) + ", expected " +
                      std::to_string(dim()));
  }
  if (!x.allFinite()) {
    throw NumericalError("feature map: non-finite state");
  }
  const Vector z = (x - mean_).cwiseQuotient(stddev()) / (3.0 * std::sqrt(static_cast<double>(dim())));
  return {project_unit_ball(z), source};
}

Vector project_unit_ball(const Vector& v) {
  const double n = v.norm();
  return n > 1.0 ? Vector(v / n) : v;
}

}  // namespace ksurf::bandit
