#include "ksurf/ksurfnet/lstm.hpp"

#include <cmath>
#include <random>
#include <string>

namespace ksurf::ksurfnet {

namespace {

Matrix sigmoid(const Matrix& z) { return z.unaryExpr([](double v) { return nn::sigmoid(v); }); }

}  // namespace

void LstmConfig::validate() const {
  if (seq_len < 1 || batch < 1 || hidden_layers < 1 || hidden_size < 1) {
    throw ConfigError("lstm config: seq_len, batch, hidden_layers and hidden_size must be >= 1");
  }
  if (epochs < 0) {
    throw ConfigError("lstm config: epochs must be >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("lstm config: learning rate must be positive");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("lstm config: Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) {
    throw ConfigError("lstm config: Adam eps must be positive");
  }
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("lstm config: train_fraction must lie in (0, 1]");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("lstm config: validation_fraction must lie in (0, 1)");
  }
}

NoiseEstimate NoiseEstimate::diagonal(const Vector& r, const Vector& q) {
  if (!r.allFinite() || !q.allFinite() || (r.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw NumericalError("noise estimate: diagonals must be finite and non-negative");
  }
  return NoiseEstimate{r.asDiagonal(), q.asDiagonal()};
}

KsurfNet::KsurfNet(const LstmConfig& cfg, Index input_dim, Index measurement_dim, Index state_dim,
                   std::uint64_t seed)
    : cfg_(cfg), input_dim_(input_dim), meas_dim_(measurement_dim), state_dim_(state_dim) {
  cfg_.validate();
  if (input_dim < 1 || measurement_dim < 1 || state_dim < 1) {
    throw ConfigError("ksurfnet: input, measurement and state dimensions must be >= 1");
  }
  std::mt19937_64 rng(seed);
  const Index H = cfg.hidden_size;
  const double scale = 1.0 / std::sqrt(static_cast<double>(H));
  Index in = input_dim;
  for (int l = 0; l < cfg.hidden_layers; ++l) {
    LstmLayer layer;
    layer.W = nn::Parameter(4 * H, in + H);
    layer.b = nn::Parameter(4 * H, 1);
    nn::uniform_init(layer.W.value, scale, rng);
    layer.b.value.block(H, 0, H, 1).setOnes();  // forget gate starts open
    layers.push_back(std::move(layer));
    in = H;
  }
  head_w = nn::Parameter(output_dim(), H);
  head_b = nn::Parameter(output_dim(), 1);
  nn::uniform_init(head_w.value, 0.1 * scale, rng);
  input_shift = Vector::Zero(input_dim);
  input_scale = Vector::Ones(input_dim);
  output_scale = Vector::Ones(output_dim());
}

Matrix KsurfNet::forward_batch(const std::vector<Matrix>& steps, LstmCache* cache) const {
  if (steps.empty()) {
    throw ConfigError("ksurfnet: empty input sequence");
  }
  const Index B = steps.front().cols();
  if (cache) {
    cache->layers.assign(layers.size(), {});
  }
  std::vector<Matrix> seq;
  seq.reserve(steps.size());
  for (const Matrix& x : steps) {
    if (x.rows() != input_dim_ || x.cols() != B) {
      throw ConfigError("ksurfnet: input step has shape " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()) + ", expected " + std::to_string(input_dim_) + "x" +
                        std::to_string(B));
    }
    seq.push_back((x.colwise() - input_shift).array().colwise() / input_scale.array());
  }

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LstmLayer& layer = layers[l];
    const Index H = layer.hidden();
    const Index in = layer.input_dim();
    Matrix h = Matrix::Zero(H, B);
    Matrix c = Matrix::Zero(H, B);
    for (std::size_t t = 0; t < seq.size(); ++t) {
      Matrix xh(in + H, B);
      xh.topRows(in) = seq[t];
      xh.bottomRows(H) = h;
      Matrix z = layer.W.value * xh;
      z.colwise() += layer.b.value.col(0);
      LstmCache::Step s;
      s.i = sigmoid(z.middleRows(0, H));
      s.f = sigmoid(z.middleRows(H, H));
      s.g = z.middleRows(2 * H, H).array().tanh();
      s.o = sigmoid(z.middleRows(3 * H, H));
      s.c_prev = c;
      c = s.f.cwiseProduct(c) + s.i.cwiseProduct(s.g);
      s.tanh_c = c.array().tanh();
      h = s.o.cwiseProduct(s.tanh_c);
      seq[t] = h;
      if (cache) {
        s.c = c;
        s.xh = std::move(xh);
        cache->layers[l].push_back(std::move(s));
      }
    }
  }
  Matrix raw = head_w.value * seq.back();
  raw.colwise() += head_b.value.col(0);
  if (!raw.allFinite()) {
    throw NumericalError("ksurfnet: non-finite activations in forward pass");
  }
  if (cache) {
    cache->top = seq.back();
    cache->raw = raw;
  }
  return raw;
}

void KsurfNet::backward(const LstmCache& cache, const Matrix& d_raw) {
  if (d_raw.rows() != output_dim() || d_raw.cols() != cache.raw.cols()) {
    throw ConfigError("ksurfnet: gradient shape does not match forward batch");
  }
  head_w.grad += d_raw * cache.top.transpose();
  head_b.grad += d_raw.rowwise().sum();

  const std::size_t T = cache.layers.front().size();
  const Index B = d_raw.cols();
  // dh from the layer above for every time step; only the last step of the
  // top layer receives a gradient from the head.
  std::vector<Matrix> dh_in(T);
  for (std::size_t t = 0; t < T; ++t) {
    dh_in[t] = Matrix::Zero(layers.back().hidden(), B);
  }
  dh_in[T - 1] = head_w.value.transpose() * d_raw;

  for (std::size_t l = layers.size(); l-- > 0;) {
    LstmLayer& layer = layers[l];
    const Index H = layer.hidden();
    const Index in = layer.input_dim();
    std::vector<Matrix> dx(T);
    Matrix dh_next = Matrix::Zero(H, B);
    Matrix dc_next = Matrix::Zero(H, B);
    for (std::size_t t = T; t-- > 0;) {
      const LstmCache::Step& s = cache.layers[l][t];
      const Matrix dh = dh_in[t] + dh_next;
      const Matrix dc =
          dc_next + dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix());
      Matrix dz(4 * H, B);
      dz.middleRows(0, H) = dc.cwiseProduct(s.g).array() * s.i.array() * (1.0 - s.i.array());
      dz.middleRows(H, H) = dc.cwiseProduct(s.c_prev).array() * s.f.array() * (1.0 - s.f.array());
      dz.middleRows(2 * H, H) = dc.cwiseProduct(s.i).array() * (1.0 - s.g.array().square());
      dz.middleRows(3 * H, H) = dh.cwiseProduct(s.tanh_c).array() * s.o.array() * (1.0 - s.o.array());
      layer.W.grad += dz * s.xh.transpose();
      layer.b.grad += dz.rowwise().sum();
      const Matrix dxh = layer.W.value.transpose() * dz;
      dx[t] = dxh.topRows(in);
      dh_next = dxh.bottomRows(H);
      dc_next = dc.cwiseProduct(s.f);
    }
    dh_in = std::move(dx);
  }
}

NoiseEstimate KsurfNet::to_noise(const Vector& raw) const {
  if (raw.size() != output_dim()) {
    throw ConfigError("ksurfnet: raw output has wrong size");
  }
  Vector d(raw.size());
  for (Index i = 0; i < raw.size(); ++i) {
    d(i) = output_scale(i) * nn::softplus(raw(i));
  }
  return NoiseEstimate::diagonal(d.head(meas_dim_), d.tail(state_dim_));
}

Vector KsurfNet::transform_derivative(const Vector& raw) const {
  Vector d(raw.size());
  for (Index i = 0; i < raw.size(); ++i) {
    d(i) = output_scale(i) * nn::sigmoid(raw(i));
  }
  return d;
}

std::vector<nn::Parameter*> KsurfNet::parameters() {
  std::vector<nn::Parameter*> out;
  for (LstmLayer& layer : layers) {
    out.push_back(&layer.W);
    out.push_back(&layer.b);
  }
  out.push_back(&head_w);
  out.push_back(&head_b);
  return out;
}

std::size_t KsurfNet::parameter_count() const {
  std::size_t n = static_cast<std::size_t>(head_w.size() + head_b.size());
  for (const LstmLayer& layer : layers) {
    n += static_cast<std::size_t>(layer.W.size() + layer.b.size());
  }
  return n;
}

void KsurfNet::zero_grad() {
  for (nn::Parameter* p : parameters()) {
    p->zero_grad();
  }
}

NoiseEstimate lstm_forward(const Matrix& sequence, const KsurfNet& net) {
  if (sequence.cols() != net.config().seq_len) {
    throw ConfigError("lstm_forward: sequence length " + std::to_string(sequence.cols()) + " != seq_len " +
                      std::to_string(net.config().seq_len));
  }
  std::vector<Matrix> steps;
  steps.reserve(static_cast<std::size_t>(sequence.cols()));
  for (Index t = 0; t < sequence.cols(); ++t) {
    steps.emplace_back(sequence.col(t));
  }
  return net.to_noise(net.forward_batch(steps).col(0));
}

}  // namespace ksurf::ksurfnet
