#pragma once

#include "ksurf/common/nn.hpp"
#include "ksurf/common/types.hpp"

#include <cstdint>
#include <vector>

namespace ksurf::ksurfnet {

enum class LstmInput { Measurements, Innovations };

/// Hyperparameters of the noise-covariance learner.
struct LstmConfig {
  int seq_len = 10;
  int batch = 16;
  double learning_rate = 1e-3;
  int hidden_layers = 2;
  int hidden_size = 64;
  int epochs = 30;  // 0 leaves the network at its initialisation
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  LstmInput input = LstmInput::Measurements;
  double train_fraction = 0.5;      // leading share of the trace used for training + validation
  double validation_fraction = 0.2;  // trailing share of that subset
  std::uint64_t seed = 1;

  void validate() const;
};

/// Diagonal R (p x p) and Q (n x n).
struct NoiseEstimate {
  Matrix R;
  Matrix Q;

  /// Diagonal matrices from the given diagonals. Negative or non-finite entries throw.
  static NoiseEstimate diagonal(const Vector& r, const Vector& q);
};

/// One LSTM layer, gate order (input, forget, cell, output).
struct LstmLayer {
  nn::Parameter W;  // 4H x (in + H), acting on [x; h_prev]
  nn::Parameter b;  // 4H x 1

  Index hidden() const { return b.value.rows() / 4; }
  Index input_dim() const { return W.value.cols() - hidden(); }
};

/// Activations kept by forward_batch for back-propagation.
struct LstmCache {
  struct Step {
    Matrix xh;  // [x; h_prev], (in + H) x B
    Matrix i, f, g, o;
    Matrix c_prev, c, tanh_c;
  };
  std::vector<std::vector<Step>> layers;  // [layer][time]
  Matrix top;                             // final hidden state of the last layer, H x B
  Matrix raw;                             // head output, (p + n) x B
};

/// Stacked LSTM with a fully connected head. The head emits p + n raw
/// values; entry i maps to a covariance diagonal through
/// scale_i * softplus(raw_i), so an all-zero network yields scale * softplus(0).
class KsurfNet {
public:
  KsurfNet() = default;
  KsurfNet(const LstmConfig& cfg, Index input_dim, Index measurement_dim, Index state_dim, std::uint64_t seed);

  const LstmConfig& config() const { return cfg_; }
  Index input_dim() const { return input_dim_; }
  Index measurement_dim() const { return meas_dim_; }
  Index state_dim() const { return state_dim_; }
  Index output_dim() const { return meas_dim_ + state_dim_; }

  /// Raw head output for a batch. `steps[t]` is input_dim x B; inputs are
  /// normalised with input_shift / input_scale before entering the first layer.
  Matrix forward_batch(const std::vector<Matrix>& steps, LstmCache* cache = nullptr) const;

  /// Accumulates parameter gradients given dLoss/draw (output_dim x B).
  void backward(const LstmCache& cache, const Matrix& d_raw);

  /// Positive diagonals from one column of raw output.
  NoiseEstimate to_noise(const Vector& raw) const;

  /// dDiag/draw for one column (elementwise).
  Vector transform_derivative(const Vector& raw) const;

  std::vector<nn::Parameter*> parameters();
  std::size_t parameter_count() const;
  void zero_grad();

  std::vector<LstmLayer> layers;
  nn::Parameter head_w;  // (p + n) x H
  nn::Parameter head_b;  // (p + n) x 1
  Vector input_shift;
  Vector input_scale;
  Vector output_scale;  // p + n, multiplies softplus

private:
  LstmConfig cfg_;
  Index input_dim_ = 0;
  Index meas_dim_ = 0;
  Index state_dim_ = 0;
};

/// Inference on a single input_dim x seq_len window.
NoiseEstimate lstm_forward(const Matrix& sequence, const KsurfNet& net);

}  // namespace ksurf::ksurfnet
