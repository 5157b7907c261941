#include "ksurf/harness/config.hpp"

#include "ksurf/ksurfnet/checkpoint.hpp"

#include <fstream>
#include <set>

namespace ksurf::harness {

using nlohmann::json;

namespace {

// Reads keys out of one JSON object and complains about the ones nobody asked for.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) {
      throw ConfigError(where() + ": expected an object");
    }
  }

  template <typename T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) {
      return false;
    }
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
    return true;
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key = {}) const {
    if (key.empty()) {
      return path_.empty() ? "config" : path_;
    }
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError("unknown config key '" + where(item.key()) + "'");
      }
    }
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_workload(const json& j, cloudsim::WorkloadSpec& w, const std::filesystem::path& base_dir) {
  Section s(j, "workload");
  s.get("poisson_rate", w.poisson_rate);
  s.get("horizon", w.horizon);
  if (const json* fc = s.child("flash_crowds")) {
    if (!fc->is_array()) {
      throw ConfigError("workload.flash_crowds: expected an array");
    }
    w.flash_crowds.clear();
    for (const json& item : *fc) {
      Section f(item, "workload.flash_crowds[]");
      cloudsim::FlashCrowd crowd;
      if (!f.get("start", crowd.start) || !f.get("duration", crowd.duration) || !f.get("amplitude", crowd.amplitude)) {
        throw ConfigError("workload.flash_crowds[]: start, duration and amplitude are required");
      }
      f.finish();
      w.flash_crowds.push_back(crowd);
    }
  }
  std::string trace;
  if (s.get("trace", trace)) {
    std::filesystem::path p(trace);
    if (p.is_relative() && !base_dir.empty()) {
      p = base_dir / p;
    }
    w.trace_override = cloudsim::read_arrival_trace(p);
  }
  s.finish();
}

void read_cluster(const json& j, cloudsim::ClusterConfig& c) {
  Section s(j, "cluster");
  s.get("min_pods", c.min_pods);
  s.get("max_pods", c.max_pods);
  s.get("initial_pods", c.initial_pods);
  s.get("actuation_delay", c.actuation_delay);
  s.get("mem_base", c.mem_base);
  s.get("mem_per_request", c.mem_per_request);
  s.finish();
}

void read_latency(const json& j, cloudsim::LatencyModel& l) {
  Section s(j, "latency");
  s.get("service_rate", l.service_rate);
  s.get("base_latency", l.base_latency);
  s.get("tick_ms", l.tick_ms);
  s.get("noise_std", l.noise_std);
  s.get("max_utilization", l.max_utilization);
  s.get("load_limit_factor", l.load_limit_factor);
  s.get("lipschitz_L", l.lipschitz_L);
  s.finish();
}

void read_kernel(const json& j, surrogate::Kernel& k, const std::string& path) {
  Section s(j, path);
  s.get("lengthscale", k.lengthscale);
  s.get("signal_variance", k.signal_variance);
  s.get("noise_variance", k.noise_variance);
  s.finish();
}

void read_bandit(const json& j, cloudsim::BanditSettings& b) {
  Section s(j, "bandit");
  s.get("decision_interval", b.decision_interval);
  s.get("slo_ms", b.slo_ms);
  s.get("latency_weight", b.latency_weight);
  s.get("cost_weight", b.cost_weight);
  s.get("history_cap", b.history_cap);
  s.get("beta_scale", b.beta_scale);
  s.get("rho_min", b.rho_min);
  if (const json* k = s.child("kernel")) {
    read_kernel(*k, b.kernel, "bandit.kernel");
  }
  s.finish();
}

void read_attention(const json& j, estimator::AttentionConfig& a) {
  Section s(j, "estimator.ksurf.attention");
  s.get("layers", a.layers);
  s.get("heads", a.heads);
  s.get("model_dim", a.model_dim);
  s.get("ff_multiplier", a.ff_multiplier);
  s.get("attn_dim", a.attn_dim);
  s.get("dropout", a.dropout);
  s.get("residual", a.residual);
  s.get("positional_encoding", a.positional_encoding);
  s.get("enabled", a.enabled);
  s.finish();
}

void read_ksurf(const json& j, estimator::KsurfOptions& k) {
  Section s(j, "estimator.ksurf");
  s.get("window", k.window);
  s.get("lift_width", k.lift_width);
  s.get("pca_components", k.pca_components);
  s.get("seed", k.seed);
  if (const json* a = s.child("attention")) {
    read_attention(*a, k.attention);
  }
  if (const json* t = s.child("training")) {
    Section ts(*t, "estimator.ksurf.training");
    ts.get("epochs", k.training.epochs);
    ts.get("batch", k.training.batch);
    ts.get("learning_rate", k.training.learning_rate);
    ts.get("seed", k.training.seed);
    ts.finish();
  }
  s.finish();
}

void read_lstm(const json& j, ksurfnet::LstmConfig& l) {
  Section s(j, "estimator.lstm");
  s.get("seq_len", l.seq_len);
  s.get("batch", l.batch);
  s.get("learning_rate", l.learning_rate);
  s.get("hidden_layers", l.hidden_layers);
  s.get("hidden_size", l.hidden_size);
  s.get("epochs", l.epochs);
  s.get("train_fraction", l.train_fraction);
  s.get("validation_fraction", l.validation_fraction);
  s.get("seed", l.seed);
  std::string input;
  if (s.get("input", input)) {
    l.input = ksurfnet::parse_lstm_input(input);
  }
  s.finish();
}

void read_estimator(const json& j, cloudsim::EstimatorSettings& e) {
  Section s(j, "estimator");
  s.get("process_noise", e.process_noise);
  s.get("measurement_noise", e.measurement_noise);
  s.get("cpu_process_noise", e.cpu_process_noise);
  s.get("cpu_measurement_noise", e.cpu_measurement_noise);
  s.get("history_ticks", e.history_ticks);
  s.get("history_seed", e.history_seed);
  if (const json* k = s.child("ksurf")) {
    read_ksurf(*k, e.ksurf);
  }
  if (const json* l = s.child("lstm")) {
    read_lstm(*l, e.lstm);
  }
  s.finish();
}

std::vector<std::uint64_t> read_seeds(const json& j) {
  std::vector<std::uint64_t> out;
  if (j.is_array()) {
    for (const json& v : j) {
      if (!v.is_number_unsigned()) {
        throw ConfigError("seeds: expected non-negative integers");
      }
      out.push_back(v.get<std::uint64_t>());
    }
    return out;
  }
  Section s(j, "seeds");
  std::uint64_t first = 1;
  std::uint64_t count = 0;
  s.get("first", first);
  if (!s.get("count", count)) {
    throw ConfigError("seeds: give a list or {\"first\": n, \"count\": m}");
  }
  s.finish();
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(first + i);
  }
  return out;
}

}  // namespace

void read_lstm_config(const json& j, ksurfnet::LstmConfig& cfg) { read_lstm(j, cfg); }
void read_ksurf_options(const json& j, estimator::KsurfOptions& opts) { read_ksurf(j, opts); }

void ExperimentConfig::validate() const {
  if (scalers.empty()) {
    throw ConfigError("experiment: at least one scaler is required");
  }
  if (seeds.empty()) {
    throw ConfigError("experiment: at least one seed is required");
  }
  for (double t : thresholds) {
    if (!(t > 0.0)) {
      throw ConfigError("experiment: thresholds must be positive");
    }
  }
  for (cloudsim::ScalerKind k : scalers) {
    if ((k == cloudsim::ScalerKind::TH || k == cloudsim::ScalerKind::KF) && thresholds.empty()) {
      throw ConfigError(std::string("experiment: scaler ") + cloudsim::to_string(k) + " needs a threshold list");
    }
  }
  if (threads < 0) {
    throw ConfigError("experiment: threads must be >= 0");
  }
  cloudsim::ScenarioConfig probe = scenario;
  if (!thresholds.empty()) {
    probe.threshold = thresholds.front();
  }
  probe.validate();
}

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.name = "flash-crowd";
  cfg.scalers = {cloudsim::ScalerKind::DR, cloudsim::ScalerKind::DRKF};
  for (std::uint64_t s = 1; s <= 20; ++s) {
    cfg.seeds.push_back(s);
  }
  cfg.scenario = cloudsim::flash_crowd_scenario(cloudsim::ScalerKind::DR, 1);
  return cfg;
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  cfg.scenario = cloudsim::ScenarioConfig{};
  Section s(doc, "");
  s.get("name", cfg.name);

  std::string scaler;
  std::vector<std::string> scalers;
  if (s.get("scaler", scaler)) {
    scalers.push_back(scaler);
  }
  if (s.get("scalers", scalers) && !scaler.empty()) {
    throw ConfigError("give either 'scaler' or 'scalers', not both");
  }
  for (const std::string& name : scalers) {
    cfg.scalers.push_back(cloudsim::parse_scaler(name));
  }

  double threshold = 0.0;
  if (s.get("threshold", threshold)) {
    cfg.thresholds.push_back(threshold);
  }
  std::vector<double> thresholds;
  if (s.get("thresholds", thresholds)) {
    if (!cfg.thresholds.empty()) {
      throw ConfigError("give either 'threshold' or 'thresholds', not both");
    }
    cfg.thresholds = thresholds;
  }
  std::string unit = "fraction";
  s.get("threshold_unit", unit);
  if (unit == "millipods") {
    for (double& t : cfg.thresholds) {
      t /= 1000.0;
    }
  } else if (unit != "fraction") {
    throw ConfigError("threshold_unit must be 'fraction' or 'millipods', got '" + unit + "'");
  }
  s.get("step_size", cfg.scenario.step_size);
  s.get("sync_period", cfg.scenario.sync_period);

  std::uint64_t seed = 0;
  if (s.get("seed", seed)) {
    cfg.seeds.push_back(seed);
  }
  if (const json* seeds = s.child("seeds")) {
    if (!cfg.seeds.empty()) {
      throw ConfigError("give either 'seed' or 'seeds', not both");
    }
    cfg.seeds = read_seeds(*seeds);
  }

  long horizon = 0;
  if (const json* w = s.child("workload")) {
    read_workload(*w, cfg.scenario.workload, base_dir);
  }
  if (s.get("horizon", horizon)) {
    cfg.scenario.workload.horizon = horizon;
  }
  if (const json* c = s.child("cluster")) {
    read_cluster(*c, cfg.scenario.cluster);
  }
  if (const json* l = s.child("latency")) {
    read_latency(*l, cfg.scenario.latency);
  }
  if (const json* m = s.child("metrics")) {
    Section ms(*m, "metrics");
    ms.get("arrival_noise", cfg.scenario.arrival_noise);
    ms.get("cpu_noise", cfg.scenario.cpu_noise);
    ms.finish();
  }
  if (const json* e = s.child("estimator")) {
    read_estimator(*e, cfg.scenario.estimator);
  }
  if (const json* b = s.child("bandit")) {
    read_bandit(*b, cfg.scenario.bandit);
  }
  std::string out;
  if (s.get("output_dir", out)) {
    cfg.output_dir = out;
    if (cfg.output_dir.is_relative() && !base_dir.empty()) {
      cfg.output_dir = base_dir / cfg.output_dir;
    }
  }
  s.get("randomize_order", cfg.randomize_order);
  s.get("order_seed", cfg.order_seed);
  s.get("threads", cfg.threads);
  s.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

}  // namespace ksurf::harness
