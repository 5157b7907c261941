#pragma once

#include "ksurf/common/types.hpp"

#include <string>

namespace ksurf::bandit {

enum class ContextSource { RawObservation, Ekf, LEkf, GpState };

const char* to_string(ContextSource s);

/// A per-arm feature vector with |c| <= 1.
struct ContextVector {
  Vector c;
  ContextSource source = ContextSource::RawObservation;
};

/// Welford running mean / variance of a scalar.
class RunningVariance {
public:
  void add(double x);
  long count() const { return n_; }
  double mean() const { return mean_; }
  /// Sample variance; 0 with fewer than two samples.
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// psi: per-dimension standardisation by running statistics, a 1/(3 sqrt d)
/// shrink so typical vectors land inside the unit ball, then projection onto it.
class FeatureMap {
public:
  FeatureMap() = default;
  explicit FeatureMap(Index dim);

  /// Fixed statistics; update() is ignored afterwards.
  static FeatureMap frozen(Vector mean, Vector stddev);

  void update(const Vector& x);
  ContextVector operator()(const Vector& x, ContextSource source = ContextSource::RawObservation) const;

  Index dim() const { return mean_.size(); }
  long count() const { return n_; }
  const Vector& mean() const { return mean_; }
  /// Running std; dimensions with no spread yet report 1.
  Vector stddev() const;

private:
  Vector mean_;
  Vector m2_;
  Vector fixed_std_;
  long n_ = 0;
  bool frozen_ = false;
};

/// Scales v onto the unit ball if it lies outside.
Vector project_unit_ball(const Vector& v);

}  // namespace ksurf::bandit
