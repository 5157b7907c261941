#pragma once

#include "ksurf/estimator/attention.hpp"
#include "ksurf/estimator/kalman.hpp"
#include "ksurf/estimator/pca.hpp"

#include <deque>
#include <memory>
#include <vector>

namespace ksurf::estimator {

/// The m most recent measurements, oldest first.
class MeasurementWindow {
public:
  explicit MeasurementWindow(std::size_t capacity);

  /// Appends z, evicting the oldest entry when full.
  void push(const Vector& z);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  Index dim() const { return entries_.empty() ? 0 : entries_.front().size(); }
  const Vector& back() const;
  const std::deque<Vector>& entries() const { return entries_; }

  /// dim x size matrix of the entries.
  Matrix as_matrix() const;

private:
  std::size_t capacity_;
  std::deque<Vector> entries_;
};

/// PCA-project the window, run the attention smoother and map the decoded
/// token back to measurement space. A disabled network returns the newest
/// raw measurement; an empty basis skips projection.
Vector denoise(const MeasurementWindow& window, const AttentionNetwork& net, const PcaBasis& basis);

/// One Ksurf iteration: denoise -> kf_predict -> kf_update. The denoised
/// vector replaces the raw measurement in the update.
StateEstimate ksurf_step(const MeasurementWindow& window, const StateEstimate& state, const SystemModel& model,
                         const AttentionNetwork& net, const PcaBasis& basis);

struct KsurfOptions {
  AttentionConfig attention;  // attention.enabled == false gives a plain EKF
  int window = 8;             // attention tokens per step
  int lift_width = 8;         // sliding-window width used as the second dimension of 1-D traces
  int pca_components = 2;
  AttentionTrainOptions training;
  std::uint64_t seed = 11;
};

/// Trained stages shared by every filter built from the same history.
struct KsurfAssets {
  PcaBasis basis;
  std::shared_ptr<const AttentionNetwork> attention;
};

/// Lifts a 1-D series to (value, trailing mean over `width` values).
std::vector<Vector> lift_series(const std::vector<double>& series, int width);

/// Fits PCA on the lifted history and, when attention is enabled, trains
/// the attention smoother on the projected sequence.
KsurfAssets prepare_scalar_ksurf(const std::vector<double>& history, const KsurfOptions& opts);

/// Streaming Ksurf over a scalar signal. Each sample is lifted to two
/// dimensions, denoised, and the first coordinate of the result is fed to a
/// scalar filter. The first sample initialises the state mean.
class ScalarKsurf {
public:
  ScalarKsurf(SystemModel model, KsurfAssets assets, const KsurfOptions& opts, double initial_variance = 1.0);

  /// Consumes one measurement and returns the posterior mean.
  double step(double z);

  const StateEstimate& state() const { return state_; }
  const SystemModel& model() const { return model_; }
  bool initialised() const { return initialised_; }

private:
  SystemModel model_;
  KsurfAssets assets_;
  MeasurementWindow window_;
  std::deque<double> recent_;
  int lift_width_;
  double initial_variance_;
  StateEstimate state_;
  bool initialised_ = false;
};

}  // namespace ksurf::estimator
