#pragma once

#include "ksurf/common/trace.hpp"
#include "ksurf/estimator/kalman.hpp"
#include "ksurf/ksurfnet/lstm.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace ksurf::ksurfnet {

/// Index ranges of a trace used for fitting: [0, train_end) trains and
/// [train_end, subset_end) validates.
struct TrainingSplit {
  std::size_t train_end = 0;
  std::size_t subset_end = 0;
};

TrainingSplit split_trace(std::size_t length, const LstmConfig& cfg);

/// Network inputs per step: the raw measurements, or the innovations of a
/// baseline filter run with `model`'s own noise.
std::vector<Vector> network_inputs(const Trace& trace, const estimator::SystemModel& model, LstmInput kind);

/// Filter start used throughout: mean from the first measurement through the
/// pseudo-inverse of H at zero, unit covariance.
estimator::StateEstimate initial_state(const estimator::SystemModel& model, const Vector& z0);

struct TrainResult {
  KsurfNet net;
  NoiseEstimate noise;             // mean network output over the validation windows
  std::vector<double> epoch_loss;  // mean one-step prediction loss per epoch
  int epochs_run = 0;
  bool diverged = false;
  std::string message;
};

/// Called after each epoch with the 1-based epoch index and the current network.
using EpochCallback = std::function<void(int epoch, const KsurfNet& net)>;

/// Fits the LSTM so that the filter with its noise output predicts the next
/// measurement well. The output scales are set so that an untrained network
/// reproduces `model.R` and `model.Q`. A loss above 1e6 stops training and
/// restores the parameters from the start of that epoch.
TrainResult train_ksurfnet(const Trace& trace, const estimator::SystemModel& model, const LstmConfig& cfg,
                           const EpochCallback& on_epoch = {});

/// Mean network output over windows ending in [begin, end).
NoiseEstimate average_noise(const KsurfNet& net, const std::vector<Vector>& inputs, std::size_t begin,
                            std::size_t end);

/// Mean absolute one-step prediction residual over steps [begin, end) of a
/// filter with constant noise run from the start of the trace.
double prediction_mae(const Trace& trace, const estimator::SystemModel& model, const NoiseEstimate& noise,
                      std::size_t begin, std::size_t end);

struct GridCell {
  double learning_rate = 0.0;
  int epochs = 0;
  double validation_mae = 0.0;
  bool failed = false;
  std::string error;
};

struct GridResult {
  LstmConfig best;
  std::vector<GridCell> cells;  // sorted by learning rate, then epochs
};

/// Trains every (learning rate, epochs) cell and keeps the lowest validation
/// MAE; ties go to the lower learning rate, then fewer epochs. One run per
/// learning rate serves all epoch counts.
GridResult grid_search(const Trace& trace, const estimator::SystemModel& model, const LstmConfig& base,
                       std::vector<double> learning_rates, std::vector<int> epochs);

struct DecileDelta {
  double delta = 0.0;  // MAE(learned) - MAE(baseline)
  double lower = 0.0;
  double upper = 0.0;
  double mae_learned = 0.0;
  double mae_baseline = 0.0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct DeltaSeries {
  std::array<DecileDelta, 10> deciles;

  int negative_count() const;
};

/// Runs both filters over the trace and compares them on 10 contiguous
/// chunks. Errors are against ground truth when the trace carries it and
/// against the one-step prediction residual otherwise. The 95% interval is
/// over the per-step paired error differences.
DeltaSeries evaluate_deciles(const Trace& trace, const estimator::SystemModel& model, const NoiseEstimate& learned,
                             const NoiseEstimate& baseline);

}  // namespace ksurf::ksurfnet
