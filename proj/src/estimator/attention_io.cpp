#include "ksurf/estimator/attention.hpp"

#include "ksurf/common/tensor_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace ksurf::estimator {

namespace {

constexpr const char* kMagic = "ksurf-attention";
constexpr int kVersion = 1;

template <typename Fn>
void for_each_tensor(AttentionNetwork& net, Fn&& fn) {
  Matrix shift = net.input_shift;
  Matrix scale = net.input_scale;
  fn("input_shift", shift);
  fn("input_scale", scale);
  net.input_shift = shift.col(0);
  net.input_scale = scale.col(0);
  fn("embed", net.embed.value);
  fn("embed_bias", net.embed_bias.value);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    auto& L = net.layers[i];
    const std::string p = "layer" + std::to_string(i) + ".";
    fn(p + "wq", L.wq.value);
    fn(p + "wk", L.wk.value);
    fn(p + "wv", L.wv.value);
    fn(p + "wo", L.wo.value);
    fn(p + "w1", L.w1.value);
    fn(p + "b1", L.b1.value);
    fn(p + "w2", L.w2.value);
    fn(p + "b2", L.b2.value);
  }
  fn("decode", net.decode.value);
  fn("decode_bias", net.decode_bias.value);
}

}  // namespace

void save_attention(std::ostream& out, const AttentionNetwork& net) {
  const AttentionConfig& c = net.config();
  out << kMagic << ' ' << kVersion << '\n';
  out << "input_dim " << net.input_dim() << '\n';
  out << "config layers " << c.layers << " heads " << c.heads << " model_dim " << c.model_dim
      << " ff_multiplier " << c.ff_multiplier << " attn_dim " << c.attn_dim << " dropout " << c.dropout
      << " residual " << c.residual << " positional_encoding " << c.positional_encoding << " enabled "
      << c.enabled << '\n';
  out << std::setprecision(17);
  AttentionNetwork copy = net;
  for_each_tensor(copy, [&](const std::string& name, Matrix& m) { io::write_tensor(out, name, m); });
  out << "end\n";
}

void save_attention(const std::filesystem::path& path, const AttentionNetwork& net) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write attention weights to " + path.string());
  }
  save_attention(out, net);
}

AttentionNetwork load_attention(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw ConfigError("not a ksurf attention weight file");
  }
  if (version != kVersion) {
    throw ConfigError("unsupported attention weight file version " + std::to_string(version));
  }
  std::string key;
  Index input_dim = 0;
  if (!(in >> key >> input_dim) || key != "input_dim") {
    throw ConfigError("attention weights: missing input_dim");
  }
  AttentionConfig cfg;
  if (!(in >> key) || key != "config") {
    throw ConfigError("attention weights: missing config line");
  }
  auto expect = [&](const char* name, auto& value) {
    if (!(in >> key) || key != name || !(in >> value)) {
      throw ConfigError(std::string("attention weights: bad config field ") + name);
    }
  };
  expect("layers", cfg.layers);
  expect("heads", cfg.heads);
  expect("model_dim", cfg.model_dim);
  expect("ff_multiplier", cfg.ff_multiplier);
  expect("attn_dim", cfg.attn_dim);
  expect("dropout", cfg.dropout);
  expect("residual", cfg.residual);
  expect("positional_encoding", cfg.positional_encoding);
  expect("enabled", cfg.enabled);

  AttentionNetwork net(cfg, input_dim, 0);
  for_each_tensor(net, [&](const std::string& name, Matrix& m) { io::read_tensor(in, name, m, "attention weights"); });
  if (!(in >> key) || key != "end") {
    throw ConfigError("attention weights: missing end marker");
  }
  return net;
}

AttentionNetwork load_attention(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open attention weights " + path.string());
  }
  return load_attention(in);
}

}  // namespace ksurf::estimator
