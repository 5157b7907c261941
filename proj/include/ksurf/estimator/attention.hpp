#pragma once

#include "ksurf/common/nn.hpp"
#include "ksurf/common/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <vector>

namespace ksurf::estimator {

/// Hyperparameters of the self-attention smoother.
///
/// The default is the desk-scale network (L=2, d=16, h=2). `full_scale()` gives
/// the full-size configuration (L=4, d=256, h=4, d_k=d_v=256, dropout 0.25).
/// `ff_multiplier` is a multiple of model_dim. `residual` controls the skip
/// connection around the attention sublayer; the feed-forward sublayer always
/// has one. `enabled == false` turns the pipeline stage into a pass-through.
struct AttentionConfig {
  int layers = 2;
  int heads = 2;
  int model_dim = 16;
  int ff_multiplier = 4;
  int attn_dim = 8;
  double dropout = 0.0;
  bool residual = true;
  bool positional_encoding = true;
  bool enabled = true;

  static AttentionConfig full_scale();

  int ff_dim() const { return ff_multiplier * model_dim; }
  int concat_dim() const { return heads * attn_dim; }
  void validate() const;
};

struct AttentionLayer {
  nn::Parameter wq;  // (heads*attn_dim) x d
  nn::Parameter wk;
  nn::Parameter wv;
  nn::Parameter wo;  // d x (heads*attn_dim)
  nn::Parameter w1;  // ff x d
  nn::Parameter b1;  // ff x 1
  nn::Parameter w2;  // d x ff
  nn::Parameter b2;  // d x 1
};

/// Stacked multi-head self-attention over a window of measurement tokens.
/// The output is the decoded final token.
class AttentionNetwork {
public:
  AttentionNetwork() = default;
  AttentionNetwork(AttentionConfig cfg, Index input_dim, std::uint64_t seed);

  /// Uniform attention, identity value/output projections, zero feed-forward,
  /// no positional encoding and no attention skip connection: the output is
  /// the mean of the window tokens. Needs input_dim <= model_dim and
  /// heads*attn_dim == model_dim.
  static AttentionNetwork identity(AttentionConfig cfg, Index input_dim);

  const AttentionConfig& config() const { return cfg_; }
  Index input_dim() const { return input_dim_; }

  /// tokens: input_dim x m, oldest first. Returns the decoded last token.
  Vector forward(const Matrix& tokens) const;

  /// Same as forward, additionally returning every attention matrix
  /// (layer-major, then head), each m x m with rows summing to 1.
  Vector forward(const Matrix& tokens, std::vector<Matrix>& attention_maps) const;

  /// Adds the gradient of ||forward(tokens) - target||^2 into the parameter
  /// grads and returns the squared error. Dropout is applied when rng is set.
  double accumulate_gradient(const Matrix& tokens, const Vector& target, std::mt19937_64* rng);

  std::vector<nn::Parameter*> parameters();
  Index parameter_count() const;

  // Fixed (non-trained) input normalisation: token' = (token - shift) / scale.
  Vector input_shift;
  Vector input_scale;

  nn::Parameter embed;        // d x input_dim
  nn::Parameter embed_bias;   // d x 1
  std::vector<AttentionLayer> layers;
  nn::Parameter decode;       // input_dim x d
  nn::Parameter decode_bias;  // input_dim x 1

private:
  struct LayerCache;
  struct Cache;
  Vector run(const Matrix& tokens, Cache* cache, std::mt19937_64* rng, std::vector<Matrix>* maps) const;

  AttentionConfig cfg_;
  Index input_dim_ = 0;
};

/// Runs the network over a token window (input_dim x m).
/// Throws ConfigError when the token dimension differs from the trained one.
Vector attention_filter(const Matrix& tokens, const AttentionNetwork& net);

struct AttentionTrainOptions {
  int window = 8;
  int epochs = 20;
  int batch = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 7;
};

struct AttentionTrainReport {
  std::vector<double> epoch_loss;  // mean squared error per epoch (normalised units)
  std::size_t examples = 0;
};

/// Self-supervised next-measurement training. Each example is a window of
/// `window` consecutive tokens and the token that follows it. Sets the input
/// normalisation from the sequence statistics before training.
AttentionTrainReport train_attention(AttentionNetwork& net, const std::vector<Vector>& sequence,
                                     const AttentionTrainOptions& opts);

// Weight files: versioned text format, see docs in README.
void save_attention(std::ostream& out, const AttentionNetwork& net);
void save_attention(const std::filesystem::path& path, const AttentionNetwork& net);
AttentionNetwork load_attention(std::istream& in);
AttentionNetwork load_attention(const std::filesystem::path& path);

}  // namespace ksurf::estimator
