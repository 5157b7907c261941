#pragma once

#include "ksurf/surrogate/gp.hpp"

#include <deque>
#include <memory>

namespace ksurf::bandit {

/// Predictive reward distribution over contexts.
class RewardModel {
public:
  virtual ~RewardModel() = default;
  virtual surrogate::Posterior predict(const Vector& c) const = 0;
  virtual void observe(const Vector& c, double reward) = 0;
  virtual std::unique_ptr<RewardModel> clone() const = 0;
};

/// GP over contexts with centred targets. Refits from scratch on every
/// observation; `max_history` > 0 keeps only the newest points.
class GpRewardModel : public RewardModel {
public:
  explicit GpRewardModel(surrogate::Kernel kernel = {}, std::size_t max_history = 0);

  surrogate::Posterior predict(const Vector& c) const override;
  void observe(const Vector& c, double reward) override;
  std::unique_ptr<RewardModel> clone() const override { return std::make_unique<GpRewardModel>(*this); }

  const surrogate::GpModel& gp() const { return gp_; }
  double target_mean() const { return offset_; }

private:
  surrogate::Kernel kernel_;
  std::size_t max_history_;
  std::deque<Vector> xs_;
  std::deque<double> ys_;
  surrogate::GpModel gp_;
  double offset_ = 0.0;
};

/// Ridge regression with a LinUCB-style width sqrt(c^T A^-1 c).
class LinearRewardModel : public RewardModel {
public:
  explicit LinearRewardModel(Index dim, double ridge = 1.0);

  surrogate::Posterior predict(const Vector& c) const override;
  void observe(const Vector& c, double reward) override;
  std::unique_ptr<RewardModel> clone() const override { return std::make_unique<LinearRewardModel>(*this); }

  Vector theta() const;

private:
  Matrix A_;
  Vector b_;
};

/// Known linear reward c^T theta with no uncertainty.
class KnownLinearModel : public RewardModel {
public:
  explicit KnownLinearModel(Vector theta) : theta_(std::move(theta)) {}

  surrogate::Posterior predict(const Vector& c) const override { return {c.dot(theta_), 0.0}; }
  void observe(const Vector&, double) override {}
  std::unique_ptr<RewardModel> clone() const override { return std::make_unique<KnownLinearModel>(*this); }

private:
  Vector theta_;
};

}  // namespace ksurf::bandit
