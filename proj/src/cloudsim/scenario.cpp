#include "ksurf/cloudsim/scenario.hpp"

#include "ksurf/ksurfnet/training.hpp"

#include <random>

namespace ksurf::cloudsim {

namespace {

enum Stream : std::uint64_t { kWorkload = 1, kLatency = 2, kMetrics = 3 };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

estimator::SystemModel arrival_model(const ScenarioConfig& cfg) {
  return estimator::SystemModel::random_walk(cfg.estimator.process_noise, cfg.arrival_measurement_noise());
}

estimator::SystemModel cpu_model(const ScenarioConfig& cfg) {
  return estimator::SystemModel::random_walk(cfg.estimator.cpu_process_noise, cfg.cpu_measurement_noise());
}

}  // namespace

EstimatorSettings::EstimatorSettings() {
  lstm.hidden_size = 16;
  lstm.epochs = 10;
}

void ScenarioConfig::validate() const {
  workload.validate();
  cluster.validate();
  latency.validate(cluster.min_pods, cluster.max_pods);
  bandit.validate();
  estimator.lstm.validate();
  if (!(threshold > 0.0)) {
    throw ConfigError("threshold must be > 0");
  }
  if (sync_period < 1) {
    throw ConfigError("sync_period must be >= 1");
  }
  if (step_size < 1) {
    throw ConfigError("step_size must be >= 1");
  }
  if (!(arrival_noise >= 0.0) || !(cpu_noise >= 0.0)) {
    throw ConfigError("metric noise must be >= 0");
  }
  if (!(estimator.process_noise > 0.0) || !(estimator.cpu_process_noise > 0.0)) {
    throw ConfigError("estimator process noise must be > 0");
  }
  if (estimator.history_ticks < 1) {
    throw ConfigError("estimator history_ticks must be >= 1");
  }
}

double ScenarioConfig::arrival_measurement_noise() const {
  if (estimator.measurement_noise > 0.0) {
    return estimator.measurement_noise;
  }
  return std::max(1e-6, arrival_noise * arrival_noise + workload.poisson_rate);
}

double ScenarioConfig::cpu_measurement_noise() const {
  if (estimator.cpu_measurement_noise > 0.0) {
    return estimator.cpu_measurement_noise;
  }
  return std::max(1e-6, cpu_noise * cpu_noise);
}

ScenarioConfig flash_crowd_scenario(ScalerKind scaler, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.scaler = scaler;
  cfg.seed = seed;
  cfg.workload.poisson_rate = 20.0;
  cfg.workload.horizon = 5000;
  cfg.workload.flash_crowds = {{1500, 300, 2.5}, {3500, 200, 3.0}};
  cfg.cluster.max_pods = 24;
  cfg.cluster.initial_pods = 6;
  cfg.latency.service_rate = 4.0;
  return cfg;
}

ScenarioAssets prepare_assets(const ScenarioConfig& cfg, bool with_ksurfnet) {
  cfg.validate();
  WorkloadSpec hw = cfg.workload;
  hw.horizon = cfg.estimator.history_ticks;
  hw.flash_crowds.clear();
  for (const FlashCrowd& f : cfg.workload.flash_crowds) {
    if (f.start + f.duration <= hw.horizon) {
      hw.flash_crowds.push_back(f);
    }
  }
  const std::vector<double> arrivals = generate_workload(hw, cfg.estimator.history_seed);
  std::mt19937_64 noise_rng = stream_rng(cfg.estimator.history_seed, kMetrics);
  std::normal_distribution<double> n01(0.0, 1.0);

  // Measured arrivals and the utilisation seen at a fixed pod count.
  ScenarioAssets out;
  std::vector<double> cpu;
  ClusterState state = ClusterState::initial(cfg.cluster);
  std::mt19937_64 lat_rng = stream_rng(cfg.estimator.history_seed, kLatency);
  for (double a : arrivals) {
    const TickMetrics m = step(state, {cfg.cluster.initial_pods}, a, cfg.cluster, cfg.latency, lat_rng);
    out.history.push_back(a + cfg.arrival_noise * n01(noise_rng));
    cpu.push_back(m.cpu + cfg.cpu_noise * n01(noise_rng));
  }
  out.arrivals = estimator::prepare_scalar_ksurf(out.history, cfg.estimator.ksurf);
  out.cpu = estimator::prepare_scalar_ksurf(cpu, cfg.estimator.ksurf);

  const estimator::SystemModel model = arrival_model(cfg);
  out.learned = ksurfnet::NoiseEstimate{model.R, model.Q};
  if (with_ksurfnet) {
    Trace trace;
    for (std::size_t k = 0; k < out.history.size(); ++k) {
      trace.t.push_back(static_cast<double>(k));
      trace.values.push_back(Vector::Constant(1, out.history[k]));
    }
    out.learned = ksurfnet::train_ksurfnet(trace, model, cfg.estimator.lstm).noise;
  }
  return out;
}

std::unique_ptr<Autoscaler> make_scaler(const ScenarioConfig& cfg, const ScenarioAssets* assets) {
  auto need_assets = [&]() {
    if (!assets) {
      throw ConfigError(std::string(to_string(cfg.scaler)) + " needs prepared estimator assets");
    }
  };
  switch (cfg.scaler) {
    case ScalerKind::NA:
      return std::make_unique<NoActionScaler>();
    case ScalerKind::TH:
      return std::make_unique<ThresholdScaler>(cfg.threshold, cfg.step_size, nullptr, cfg.sync_period);
    case ScalerKind::KF:
      need_assets();
      return std::make_unique<ThresholdScaler>(
          cfg.threshold, cfg.step_size,
          std::make_unique<estimator::ScalarKsurf>(cpu_model(cfg), assets->cpu, cfg.estimator.ksurf,
                                                   cfg.cpu_measurement_noise()),
          cfg.sync_period);
    case ScalerKind::DR:
    case ScalerKind::DRKF:
    case ScalerKind::DRRQ: {
      std::unique_ptr<estimator::ScalarKsurf> ekf;
      std::unique_ptr<estimator::ScalarKsurf> lekf;
      if (cfg.scaler != ScalerKind::DR) {
        need_assets();
        const estimator::SystemModel model = arrival_model(cfg);
        ekf = std::make_unique<estimator::ScalarKsurf>(model, assets->arrivals, cfg.estimator.ksurf,
                                                       cfg.arrival_measurement_noise());
        if (cfg.scaler == ScalerKind::DRRQ) {
          lekf = std::make_unique<estimator::ScalarKsurf>(model.with_noise(assets->learned.Q, assets->learned.R),
                                                          assets->arrivals, cfg.estimator.ksurf,
                                                          assets->learned.R(0, 0));
        }
      }
      return std::make_unique<BanditScaler>(cfg.scaler, cfg.bandit, cfg.cluster, cfg.latency, cfg.workload,
                                            std::move(ekf), std::move(lekf));
    }
  }
  throw ConfigError("unknown scaler");
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const ScenarioAssets* assets) {
  cfg.validate();
  std::optional<ScenarioAssets> own;
  if (!assets && (cfg.scaler == ScalerKind::KF || cfg.scaler == ScalerKind::DRKF || cfg.scaler == ScalerKind::DRRQ)) {
    own = prepare_assets(cfg, cfg.scaler == ScalerKind::DRRQ);
    assets = &*own;
  }
  std::unique_ptr<Autoscaler> scaler = make_scaler(cfg, assets);

  const std::vector<double> arrivals = generate_workload(cfg.workload, cfg.seed);
  std::mt19937_64 lat_rng = stream_rng(cfg.seed, kLatency);
  std::mt19937_64 metric_rng = stream_rng(cfg.seed, kMetrics);
  std::normal_distribution<double> n01(0.0, 1.0);

  ScenarioResult result;
  result.config = cfg;
  result.ticks.reserve(arrivals.size());
  ClusterState state = ClusterState::initial(cfg.cluster);
  for (double a : arrivals) {
    const ScalingAction action = scaler->decide(state);
    const TickMetrics m = step(state, action, a, cfg.cluster, cfg.latency, lat_rng);
    Observation obs;
    obs.tick = m.tick;
    obs.pods = m.pods;
    obs.latency = m.latency;
    obs.queue = m.queue;
    obs.arrivals = a + cfg.arrival_noise * n01(metric_rng);
    obs.cpu = m.cpu + cfg.cpu_noise * n01(metric_rng);
    scaler->observe(obs);
    result.ticks.push_back(m);
  }
  if (const bandit::RegretTrace* r = scaler->regret()) {
    result.regret = *r;
  }
  result.diagnostics = scaler->diagnostics();
  return result;
}

}  // namespace ksurf::cloudsim
