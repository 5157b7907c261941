#include "ksurf/ksurfnet/checkpoint.hpp"

#include "ksurf/common/tensor_io.hpp"

#include <fstream>
#include <iomanip>
#include <string>

namespace ksurf::ksurfnet {

namespace {

constexpr const char* kMagic = "ksurfnet-checkpoint";
constexpr int kVersion = 1;
constexpr const char* kWhat = "ksurfnet checkpoint";

template <typename Fn>
void for_each_tensor(KsurfNet& net, Fn&& fn) {
  auto vec = [&](const std::string& name, Vector& v) {
    Matrix m = v;
    fn(name, m);
    v = m.col(0);
  };
  vec("input_shift", net.input_shift);
  vec("input_scale", net.input_scale);
  vec("output_scale", net.output_scale);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    fn("layer" + std::to_string(i) + ".W", net.layers[i].W.value);
    fn("layer" + std::to_string(i) + ".b", net.layers[i].b.value);
  }
  fn("head_w", net.head_w.value);
  fn("head_b", net.head_b.value);
}

}  // namespace

const char* to_string(LstmInput kind) { return kind == LstmInput::Measurements ? "measurements" : "innovations"; }

LstmInput parse_lstm_input(const std::string& text) {
  if (text == "measurements") {
    return LstmInput::Measurements;
  }
  if (text == "innovations") {
    return LstmInput::Innovations;
  }
  throw ConfigError("unknown LSTM input kind '" + text + "' (expected measurements or innovations)");
}

void save_checkpoint(std::ostream& out, const KsurfNet& net) {
  const LstmConfig& c = net.config();
  out << kMagic << ' ' << kVersion << '\n';
  out << "dims input " << net.input_dim() << " measurement " << net.measurement_dim() << " state "
      << net.state_dim() << '\n';
  out << std::setprecision(17);
  out << "config seq_len " << c.seq_len << " batch " << c.batch << " learning_rate " << c.learning_rate
      << " hidden_layers " << c.hidden_layers << " hidden_size " << c.hidden_size << " epochs " << c.epochs
      << " adam_beta1 " << c.adam_beta1 << " adam_beta2 " << c.adam_beta2 << " adam_eps " << c.adam_eps
      << " input " << to_string(c.input) << " train_fraction " << c.train_fraction << " validation_fraction "
      << c.validation_fraction << " seed " << c.seed << '\n';
  KsurfNet copy = net;
  for_each_tensor(copy, [&](const std::string& name, Matrix& m) { io::write_tensor(out, name, m); });
  out << "end\n";
}

void save_checkpoint(const std::filesystem::path& path, const KsurfNet& net) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write checkpoint " + path.string());
  }
  save_checkpoint(out, net);
}

KsurfNet load_checkpoint(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw ConfigError("not a ksurfnet checkpoint");
  }
  if (version != kVersion) {
    throw ConfigError("unsupported ksurfnet checkpoint version " + std::to_string(version));
  }
  std::string key;
  auto expect = [&](const char* name, auto& value) {
    if (!(in >> key) || key != name || !(in >> value)) {
      throw ConfigError(std::string(kWhat) + ": bad field " + name);
    }
  };
  Index input = 0;
  Index meas = 0;
  Index state = 0;
  if (!(in >> key) || key != "dims") {
    throw ConfigError(std::string(kWhat) + ": missing dims line");
  }
  expect("input", input);
  expect("measurement", meas);
  expect("state", state);
  if (!(in >> key) || key != "config") {
    throw ConfigError(std::string(kWhat) + ": missing config line");
  }
  LstmConfig c;
  std::string input_kind;
  expect("seq_len", c.seq_len);
  expect("batch", c.batch);
  expect("learning_rate", c.learning_rate);
  expect("hidden_layers", c.hidden_layers);
  expect("hidden_size", c.hidden_size);
  expect("epochs", c.epochs);
  expect("adam_beta1", c.adam_beta1);
  expect("adam_beta2", c.adam_beta2);
  expect("adam_eps", c.adam_eps);
  expect("input", input_kind);
  expect("train_fraction", c.train_fraction);
  expect("validation_fraction", c.validation_fraction);
  expect("seed", c.seed);
  c.input = parse_lstm_input(input_kind);

  KsurfNet net(c, input, meas, state, 0);
  for_each_tensor(net, [&](const std::string& name, Matrix& m) { io::read_tensor(in, name, m, kWhat); });
  if (!(in >> key) || key != "end") {
    throw ConfigError(std::string(kWhat) + ": missing end marker");
  }
  return net;
}

KsurfNet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open checkpoint " + path.string());
  }
  return load_checkpoint(in);
}

}  // namespace ksurf::ksurfnet
