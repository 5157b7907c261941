#include "ksurf/estimator/attention.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ksurf::estimator {

AttentionConfig AttentionConfig::full_scale() {
  AttentionConfig c;
  c.layers = 4;
  c.heads = 4;
  c.model_dim = 256;
  c.ff_multiplier = 4;
  c.attn_dim = 256;
  c.dropout = 0.25;
  return c;
}

void AttentionConfig::validate() const {
  if (layers < 1 || heads < 1 || model_dim < 1 || ff_multiplier < 1 || attn_dim < 1) {
    throw ConfigError("attention config: all counts must be >= 1");
  }
  if (model_dim % heads != 0) {
    throw ConfigError("attention config: model_dim must be divisible by heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("attention config: dropout must be in [0, 1)");
  }
}

struct AttentionNetwork::LayerCache {
  Matrix input;                 // d x m
  std::vector<Matrix> q, k, v;  // per head, attn_dim x m
  std::vector<Matrix> attn;     // per head, m x m
  Matrix concat;                // (heads*attn_dim) x m
  Matrix mid;                   // d x m
  Matrix hidden_pre;            // ff x m
  Matrix hidden;                // ff x m, after relu and dropout
  Matrix mask;                  // ff x m dropout scale (empty when no dropout)
};

struct AttentionNetwork::Cache {
  Matrix tokens;  // normalised input
  std::vector<LayerCache> layers;
  Matrix final_out;
};

namespace {

Matrix positional_encoding(Index d, Index m) {
  Matrix pe(d, m);
  for (Index pos = 0; pos < m; ++pos) {
    for (Index i = 0; i < d; ++i) {
      const double rate = std::pow(10000.0, static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      pe(i, pos) = (i % 2 == 0) ? std::sin(pos / rate) : std::cos(pos / rate);
    }
  }
  return pe;
}

void softmax_rows(Matrix& s) {
  for (Index i = 0; i < s.rows(); ++i) {
    const double mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp();
    s.row(i) /= s.row(i).sum();
  }
}

double glorot(Index fan_in, Index fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

}  // namespace

AttentionNetwork::AttentionNetwork(AttentionConfig cfg, Index input_dim, std::uint64_t seed)
    : cfg_(cfg), input_dim_(input_dim) {
  cfg_.validate();
  if (input_dim < 1) {
    throw ConfigError("attention network needs input_dim >= 1");
  }
  std::mt19937_64 rng(seed);
  const Index d = cfg_.model_dim;
  const Index c = cfg_.concat_dim();
  const Index ff = cfg_.ff_dim();
  input_shift = Vector::Zero(input_dim);
  input_scale = Vector::Ones(input_dim);
  embed = nn::Parameter(d, input_dim);
  embed_bias = nn::Parameter(d, 1);
  nn::uniform_init(embed.value, glorot(input_dim, d), rng);
  layers.resize(static_cast<std::size_t>(cfg_.layers));
  for (auto& layer : layers) {
    layer.wq = nn::Parameter(c, d);
    layer.wk = nn::Parameter(c, d);
    layer.wv = nn::Parameter(c, d);
    layer.wo = nn::Parameter(d, c);
    layer.w1 = nn::Parameter(ff, d);
    layer.b1 = nn::Parameter(ff, 1);
    layer.w2 = nn::Parameter(d, ff);
    layer.b2 = nn::Parameter(d, 1);
    nn::uniform_init(layer.wq.value, glorot(d, c), rng);
    nn::uniform_init(layer.wk.value, glorot(d, c), rng);
    nn::uniform_init(layer.wv.value, glorot(d, c), rng);
    // Small output projections keep the residual stream close to the embedding at init.
    nn::uniform_init(layer.wo.value, 0.1 * glorot(c, d), rng);
    nn::uniform_init(layer.w1.value, glorot(d, ff), rng);
    nn::uniform_init(layer.w2.value, 0.1 * glorot(ff, d), rng);
  }
  decode = nn::Parameter(input_dim, d);
  decode_bias = nn::Parameter(input_dim, 1);
  nn::uniform_init(decode.value, glorot(d, input_dim), rng);
}

AttentionNetwork AttentionNetwork::identity(AttentionConfig cfg, Index input_dim) {
  cfg.residual = false;
  cfg.positional_encoding = false;
  cfg.dropout = 0.0;
  if (input_dim > cfg.model_dim || cfg.concat_dim() != cfg.model_dim) {
    throw ConfigError("identity attention needs input_dim <= model_dim and heads*attn_dim == model_dim");
  }
  AttentionNetwork net(cfg, input_dim, 0);
  const Index d = cfg.model_dim;
  net.embed.value.setZero();
  net.embed.value.topLeftCorner(input_dim, input_dim).setIdentity();
  net.embed_bias.value.setZero();
  for (auto& layer : net.layers) {
    layer.wq.value.setZero();
    layer.wk.value.setZero();
    layer.wv.value = Matrix::Identity(d, d);
    layer.wo.value = Matrix::Identity(d, d);
    layer.w1.value.setZero();
    layer.b1.value.setZero();
    layer.w2.value.setZero();
    layer.b2.value.setZero();
  }
  net.decode.value.setZero();
  net.decode.value.topLeftCorner(input_dim, input_dim).setIdentity();
  net.decode_bias.value.setZero();
  return net;
}

Vector AttentionNetwork::run(const Matrix& tokens, Cache* cache, std::mt19937_64* rng,
                             std::vector<Matrix>* maps) const {
  if (tokens.rows() != input_dim_) {
    throw ConfigError("attention input dimension " + std::to_string(tokens.rows()) +
                      " does not match trained dimension " + std::to_string(input_dim_));
  }
  if (tokens.cols() < 1) {
    throw ConfigError("attention window is empty");
  }
  const Index m = tokens.cols();
  const Index dk = cfg_.attn_dim;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  Matrix norm = (tokens.colwise() - input_shift).array().colwise() / input_scale.array();
  Matrix x = (embed.value * norm).colwise() + embed_bias.value.col(0);
  if (cfg_.positional_encoding) {
    x += positional_encoding(cfg_.model_dim, m);
  }
  if (cache) {
    cache->tokens = norm;
    cache->layers.assign(layers.size(), LayerCache{});
  }

  const bool use_dropout = rng != nullptr && cfg_.dropout > 0.0;
  std::bernoulli_distribution keep(1.0 - cfg_.dropout);

  for (std::size_t li = 0; li < layers.size(); ++li) {
    const AttentionLayer& L = layers[li];
    Matrix concat(cfg_.concat_dim(), m);
    LayerCache* lc = cache ? &cache->layers[li] : nullptr;
    if (lc) {
      lc->input = x;
    }
    const Matrix Q = L.wq.value * x;
    const Matrix K = L.wk.value * x;
    const Matrix V = L.wv.value * x;
    for (int h = 0; h < cfg_.heads; ++h) {
      const Index off = static_cast<Index>(h) * dk;
      Matrix qh = Q.middleRows(off, dk);
      Matrix kh = K.middleRows(off, dk);
      Matrix vh = V.middleRows(off, dk);
      Matrix scores = (qh.transpose() * kh) * inv_sqrt_dk;
      softmax_rows(scores);
      concat.middleRows(off, dk) = vh * scores.transpose();
      if (maps) {
        maps->push_back(scores);
      }
      if (lc) {
        lc->q.push_back(std::move(qh));
        lc->k.push_back(std::move(kh));
        lc->v.push_back(std::move(vh));
        lc->attn.push_back(std::move(scores));
      }
    }
    Matrix mid = L.wo.value * concat;
    if (cfg_.residual) {
      mid += x;
    }
    Matrix hidden_pre = (L.w1.value * mid).colwise() + L.b1.value.col(0);
    Matrix hidden = hidden_pre.cwiseMax(0.0);
    Matrix mask;
    if (use_dropout) {
      mask.resize(hidden.rows(), hidden.cols());
      const double inv_keep = 1.0 / (1.0 - cfg_.dropout);
      for (Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = keep(*rng) ? inv_keep : 0.0;
      }
      hidden = hidden.cwiseProduct(mask);
    }
    Matrix out = mid + ((L.w2.value * hidden).colwise() + L.b2.value.col(0));
    if (lc) {
      lc->concat = std::move(concat);
      lc->mid = std::move(mid);
      lc->hidden_pre = std::move(hidden_pre);
      lc->hidden = std::move(hidden);
      lc->mask = std::move(mask);
    }
    x = std::move(out);
  }
  if (cache) {
    cache->final_out = x;
  }
  Vector y = decode.value * x.col(m - 1) + decode_bias.value.col(0);
  return (y.array() * input_scale.array()).matrix() + input_shift;
}

Vector AttentionNetwork::forward(const Matrix& tokens) const { return run(tokens, nullptr, nullptr, nullptr); }

Vector AttentionNetwork::forward(const Matrix& tokens, std::vector<Matrix>& attention_maps) const {
  attention_maps.clear();
  return run(tokens, nullptr, nullptr, &attention_maps);
}

double AttentionNetwork::accumulate_gradient(const Matrix& tokens, const Vector& target, std::mt19937_64* rng) {
  Cache cache;
  const Vector y = run(tokens, &cache, rng, nullptr);
  // Loss is measured in normalised units so every coordinate weighs the same.
  const Vector err = ((y - target).array() / input_scale.array()).matrix();
  const double loss = err.squaredNorm();

  const Index m = tokens.cols();
  const Index dk = cfg_.attn_dim;
  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));

  const Vector dy = 2.0 * err;  // d loss / d (normalised output)
  decode.grad += dy * cache.final_out.col(m - 1).transpose();
  decode_bias.grad.col(0) += dy;
  Matrix dx = Matrix::Zero(cfg_.model_dim, m);
  dx.col(m - 1) = decode.value.transpose() * dy;

  for (std::size_t li = layers.size(); li-- > 0;) {
    AttentionLayer& L = layers[li];
    const LayerCache& lc = cache.layers[li];
    // Feed-forward sublayer: out = mid + w2 * hidden + b2.
    Matrix dmid = dx;
    L.w2.grad += dx * lc.hidden.transpose();
    L.b2.grad.col(0) += dx.rowwise().sum();
    Matrix dhidden = L.w2.value.transpose() * dx;
    if (lc.mask.size() > 0) {
      dhidden = dhidden.cwiseProduct(lc.mask);
    }
    Matrix dpre = dhidden.array() * (lc.hidden_pre.array() > 0.0).cast<double>();
    L.w1.grad += dpre * lc.mid.transpose();
    L.b1.grad.col(0) += dpre.rowwise().sum();
    dmid += L.w1.value.transpose() * dpre;

    // Attention sublayer: mid = [x] + wo * concat.
    Matrix dinput = cfg_.residual ? dmid : Matrix::Zero(cfg_.model_dim, m);
    L.wo.grad += dmid * lc.concat.transpose();
    const Matrix dconcat = L.wo.value.transpose() * dmid;
    Matrix dQ(cfg_.concat_dim(), m);
    Matrix dK(cfg_.concat_dim(), m);
    Matrix dV(cfg_.concat_dim(), m);
    for (int h = 0; h < cfg_.heads; ++h) {
      const Index off = static_cast<Index>(h) * dk;
      const Matrix& A = lc.attn[static_cast<std::size_t>(h)];
      const Matrix dout = dconcat.middleRows(off, dk);
      dV.middleRows(off, dk) = dout * A;
      const Matrix dA = dout.transpose() * lc.v[static_cast<std::size_t>(h)];
      Matrix dS(m, m);
      for (Index i = 0; i < m; ++i) {
        const double dot = A.row(i).dot(dA.row(i));
        dS.row(i) = A.row(i).array() * (dA.row(i).array() - dot);
      }
      dQ.middleRows(off, dk) = lc.k[static_cast<std::size_t>(h)] * dS.transpose() * inv_sqrt_dk;
      dK.middleRows(off, dk) = lc.q[static_cast<std::size_t>(h)] * dS * inv_sqrt_dk;
    }
    L.wq.grad += dQ * lc.input.transpose();
    L.wk.grad += dK * lc.input.transpose();
    L.wv.grad += dV * lc.input.transpose();
    dinput += L.wq.value.transpose() * dQ + L.wk.value.transpose() * dK + L.wv.value.transpose() * dV;
    dx = std::move(dinput);
  }
  embed.grad += dx * cache.tokens.transpose();
  embed_bias.grad.col(0) += dx.rowwise().sum();
  return loss;
}

std::vector<nn::Parameter*> AttentionNetwork::parameters() {
  std::vector<nn::Parameter*> out{&embed, &embed_bias};
  for (auto& L : layers) {
    for (nn::Parameter* p : {&L.wq, &L.wk, &L.wv, &L.wo, &L.w1, &L.b1, &L.w2, &L.b2}) {
      out.push_back(p);
    }
  }
  out.push_back(&decode);
  out.push_back(&decode_bias);
  return out;
}

Index AttentionNetwork::parameter_count() const {
  Index n = embed.size() + embed_bias.size() + decode.size() + decode_bias.size();
  for (const auto& L : layers) {
    n += L.wq.size() + L.wk.size() + L.wv.size() + L.wo.size() + L.w1.size() + L.b1.size() + L.w2.size() +
         L.b2.size();
  }
  return n;
}

Vector attention_filter(const Matrix& tokens, const AttentionNetwork& net) { return net.forward(tokens); }

AttentionTrainReport train_attention(AttentionNetwork& net, const std::vector<Vector>& sequence,
                                     const AttentionTrainOptions& opts) {
  if (opts.window < 1 || opts.epochs < 0 || opts.batch < 1 || !(opts.learning_rate > 0.0)) {
    throw ConfigError("train_attention: invalid options");
  }
  const auto w = static_cast<std::size_t>(opts.window);
  if (sequence.size() < w + 1) {
    throw ConfigError("train_attention: sequence shorter than window + 1");
  }
  const Index dim = net.input_dim();
  Vector mean = Vector::Zero(dim);
  for (const Vector& v : sequence) {
    if (v.size() != dim) {
      throw ConfigError("train_attention: token dimension does not match network input");
    }
    mean += v;
  }
  mean /= static_cast<double>(sequence.size());
  Vector var = Vector::Zero(dim);
  for (const Vector& v : sequence) {
    var += (v - mean).cwiseAbs2();
  }
  var /= static_cast<double>(sequence.size());
  net.input_shift = mean;
  net.input_scale = var.cwiseSqrt().unaryExpr([](double s) { return s > 1e-12 ? s : 1.0; });

  std::vector<std::size_t> starts(sequence.size() - w);
  std::iota(starts.begin(), starts.end(), 0);

  AttentionTrainReport report;
  report.examples = starts.size();
  std::mt19937_64 rng(opts.seed);
  nn::Adam adam(net.parameters(), nn::AdamOptions{opts.learning_rate, 0.9, 0.999, 1e-8});
  Matrix tokens(dim, static_cast<Index>(w));
  for (int epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(starts.begin(), starts.end(), rng);
    double total = 0.0;
    for (std::size_t b = 0; b < starts.size(); b += static_cast<std::size_t>(opts.batch)) {
      const std::size_t end = std::min(starts.size(), b + static_cast<std::size_t>(opts.batch));
      adam.zero_grad();
      for (std::size_t i = b; i < end; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
          tokens.col(static_cast<Index>(j)) = sequence[starts[i] + j];
        }
        total += net.accumulate_gradient(tokens, sequence[starts[i] + w], &rng);
      }
      const double inv = 1.0 / static_cast<double>(end - b);
      for (nn::Parameter* p : net.parameters()) {
        p->grad *= inv;
      }
      adam.step();
    }
    const double epoch_loss = total / static_cast<double>(starts.size());
    if (!std::isfinite(epoch_loss)) {
      throw NumericalError("attention training diverged at epoch " + std::to_string(epoch));
    }
    report.epoch_loss.push_back(epoch_loss);
  }
  return report;
}

}  // namespace ksurf::estimator
