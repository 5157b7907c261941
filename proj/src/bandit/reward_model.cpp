#include "ksurf/bandit/reward_model.hpp"

#include <numeric>

namespace ksurf::bandit {

GpRewardModel::GpRewardModel(surrogate::Kernel kernel, std::size_t max_history)
    : kernel_(kernel), max_history_(max_history) {
  kernel_.validate();
  gp_ = surrogate::gp_fit({}, {}, kernel_);
}

surrogate::Posterior GpRewardModel::predict(const Vector& c) const {
  surrogate::Posterior p = surrogate::gp_posterior(gp_, c);
  p.mean += offset_;
  return p;
}

void GpRewardModel::observe(const Vector& c, double reward) {
  xs_.push_back(c);
  ys_.push_back(reward);
  bool evicted = false;
  if (max_history_ > 0 && xs_.size() > max_history_) {
    xs_.pop_front();
    ys_.pop_front();
    evicted = true;
  }
  offset_ = std::accumulate(ys_.begin(), ys_.end(), 0.0) / static_cast<double>(ys_.size());
  Vector centred(static_cast<Index>(ys_.size()));
  for (std::size_t i = 0; i < ys_.size(); ++i) {
    centred(static_cast<Index>(i)) = ys_[i] - offset_;
  }
  if (evicted) {
    gp_ = surrogate::gp_fit(std::vector<Vector>(xs_.begin(), xs_.end()),
                            std::vector<double>(centred.data(), centred.data() + centred.size()), kernel_);
  } else {
    gp_ = surrogate::gp_extend(std::move(gp_), c, centred);
  }
}

LinearRewardModel::LinearRewardModel(Index dim, double ridge)
    : A_(ridge * Matrix::Identity(dim, dim)), b_(Vector::Zero(dim)) {
  if (dim < 1 || !(ridge > 0.0)) {
    throw ConfigError("linear reward model: need dim >= 1 and ridge > 0");
  }
}

Vector LinearRewardModel::theta() const { return A_.ldlt().solve(b_); }

surrogate::Posterior LinearRewardModel::predict(const Vector& c) const {
  const auto ldlt = A_.ldlt();
  return {c.dot(ldlt.solve(b_)), std::max(0.0, c.dot(ldlt.solve(c)))};
}

void LinearRewardModel::observe(const Vector& c, double reward) {
  A_ += c * c.transpose();
  b_ += reward * c;
}

}  // namespace ksurf::bandit
