#include "ksurf/cloudsim/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ksurf::cloudsim {

double erlang_c(int servers, double offered_load) {
  if (servers < 1 || offered_load < 0.0) {
    throw ConfigError("erlang_c: need servers >= 1 and non-negative load");
  }
  const double rho = offered_load / servers;
  if (rho >= 1.0) {
    return 1.0;
  }
  // Erlang-B recursion, then convert.
  double b = 1.0;
  for (int k = 1; k <= servers; ++k) {
    b = offered_load * b / (k + offered_load * b);
  }
  return b / (1.0 - rho * (1.0 - b));
}

void LatencyModel::validate(int min_pods, int max_pods) const {
  if (!(service_rate > 0.0) || !(tick_ms > 0.0) || !(base_latency >= 0.0) || !(noise_std >= 0.0)) {
    throw ConfigError("latency model: service_rate, tick_ms > 0 and base_latency, noise_std >= 0 required");
  }
  if (!(max_utilization > 0.0 && max_utilization < 1.0) || !(load_limit_factor > 0.0)) {
    throw ConfigError("latency model: max_utilization must lie in (0, 1) and load_limit_factor be positive");
  }
  if (lipschitz_L < 0.0) {
    throw ConfigError("latency model: lipschitz_L must be >= 0");
  }
  if (lipschitz_L > 0.0) {
    const double bound = lipschitz_bound(min_pods, max_pods);
    if (lipschitz_L < bound) {
      throw ConfigError("latency model: lipschitz_L = " + std::to_string(lipschitz_L) +
                        " is below the model's slope bound " + std::to_string(bound));
    }
  }
}

double LatencyModel::erlang_wait(int pods, double load) const {
  const double lam = std::clamp(load, 0.0, max_utilization * pods * service_rate);
  return erlang_c(pods, lam / service_rate) / (pods * service_rate - lam);
}

double LatencyModel::expected(int pods, double load, double queue, int max_pods) const {
  const double limit = load_limit_factor * max_pods * service_rate;
  const double lam = std::clamp(load, 0.0, limit);
  const double capacity = pods * service_rate;
  return base_latency + (erlang_wait(pods, lam) + 1.0 / service_rate + std::max(0.0, queue) / capacity) * tick_ms;
}

double LatencyModel::lipschitz_bound(int min_pods, int max_pods) const {
  const double limit = load_limit_factor * max_pods * service_rate;
  const int n = 400;
  double worst = 0.0;
  for (int c = min_pods; c <= max_pods; ++c) {
    double prev = expected(c, 0.0, 0.0, max_pods);
    for (int i = 1; i <= n; ++i) {
      const double lam = limit * i / n;
      const double cur = expected(c, lam, 0.0, max_pods);
      worst = std::max(worst, std::abs(cur - prev) / (limit / n));
      if (c < max_pods) {
        worst = std::max(worst, std::abs(expected(c + 1, lam, 0.0, max_pods) - cur));
      }
      prev = cur;
    }
  }
  return worst;
}

void ClusterConfig::validate() const {
  if (min_pods < 1 || max_pods < min_pods) {
    throw ConfigError("cluster: need 1 <= min_pods <= max_pods");
  }
  if (initial_pods < min_pods || initial_pods > max_pods) {
    throw ConfigError("cluster: initial_pods must lie within the pod bounds");
  }
  if (actuation_delay < 0) {
    throw ConfigError("cluster: actuation_delay must be >= 0");
  }
  if (!(mem_base >= 0.0) || !(mem_per_request >= 0.0)) {
    throw ConfigError("cluster: memory parameters must be >= 0");
  }
}

int ClusterConfig::clamp(int pods) const { return std::clamp(pods, min_pods, max_pods); }

ClusterState ClusterState::initial(const ClusterConfig& cfg) {
  cfg.validate();
  ClusterState s;
  s.pods = cfg.initial_pods;
  s.mem = cfg.mem_base;
  return s;
}

TickMetrics step(ClusterState& state, const ScalingAction& action, double arrivals, const ClusterConfig& cfg,
                 const LatencyModel& lm, std::mt19937_64& rng) {
  if (!(arrivals >= 0.0) || !std::isfinite(arrivals)) {
    throw ConfigError("step: arrivals must be finite and >= 0");
  }
  state.pending.push_back(cfg.clamp(action.target_pods));
  if (state.pending.size() > static_cast<std::size_t>(cfg.actuation_delay)) {
    state.pods = state.pending.front();
    state.pending.pop_front();
  }

  const double capacity = state.pods * lm.service_rate;
  const double demand = state.queue + arrivals;
  const double served = std::min(demand, capacity);
  const double backlog = state.queue;
  state.queue = demand - served;
  state.cpu = served / capacity;
  state.mem = cfg.mem_base + cfg.mem_per_request * served / state.pods;

  std::normal_distribution<double> noise(0.0, 1.0);
  const double eps = lm.noise_std > 0.0 ? lm.noise_std * noise(rng) : 0.0;
  TickMetrics m;
  m.tick = state.tick;
  m.pods = state.pods;
  m.cpu = state.cpu;
  m.mem = state.mem;
  m.queue = state.queue;
  m.arrivals = arrivals;
  m.served = served;
  m.latency = std::max(0.0, lm.expected(state.pods, arrivals, backlog, cfg.max_pods) + eps);
  ++state.tick;
  return m;
}

}  // namespace ksurf::cloudsim
