#pragma once

#include "ksurf/common/types.hpp"

#include <deque>
#include <random>

namespace ksurf::cloudsim {

/// Request latency in milliseconds as a function of pods c, offered load
/// lambda (arrivals per tick) and backlog:
///
///   base + (Wq(c, lambda) + 1/mu) * tick_ms + queue / (c mu) * tick_ms + noise
///
/// Wq is the Erlang-C mean wait. It saturates once utilisation reaches
/// `max_utilization`; overload then shows up through the backlog term.
/// lambda is clamped to `load_limit_factor * c_max * mu`, which keeps the
/// noise-free latency Lipschitz on the whole domain.
struct LatencyModel {
  double service_rate = 4.0;  // mu, requests per pod per tick
  double base_latency = 50.0;
  double tick_ms = 1000.0;
  double noise_std = 20.0;
  double max_utilization = 0.95;
  double load_limit_factor = 2.0;
  double lipschitz_L = 0.0;  // 0 = derive from the model

  void validate(int min_pods, int max_pods) const;

  /// Mean queueing wait in ticks (no service time).
  double erlang_wait(int pods, double load) const;

  /// Noise-free latency.
  double expected(int pods, double load, double queue, int max_pods) const;

  /// Largest slope of expected() over pods in [min, max] and load in
  /// [0, load limit], measured on a fine grid.
  double lipschitz_bound(int min_pods, int max_pods) const;
};

/// Erlang-C probability that an arrival waits (c servers, offered load a = lambda / mu).
double erlang_c(int servers, double offered_load);

struct ClusterConfig {
  int min_pods = 1;
  int max_pods = 24;
  int initial_pods = 4;
  int actuation_delay = 3;    // ticks between a decision and the pod count changing
  double mem_base = 16.0;     // MiB per pod
  double mem_per_request = 0.5;  // MiB per served request per tick, per pod

  void validate() const;
  int clamp(int pods) const;
};

struct ClusterState {
  long tick = 0;
  int pods = 1;
  double cpu = 0.0;    // per-pod utilisation in [0, 1]
  double mem = 0.0;    // MiB per pod
  double queue = 0.0;  // pending requests
  std::deque<int> pending;  // issued targets waiting for actuation

  static ClusterState initial(const ClusterConfig& cfg);
};

struct ScalingAction {
  int target_pods = 1;
};

struct TickMetrics {
  long tick = 0;
  int pods = 0;
  double cpu = 0.0;
  double mem = 0.0;
  double queue = 0.0;
  double latency = 0.0;
  double arrivals = 0.0;
  double served = 0.0;
};

/// Advances one tick: applies the target issued `actuation_delay` ticks ago,
/// serves min(queue + arrivals, pods * mu) and samples a latency.
TickMetrics step(ClusterState& state, const ScalingAction& action, double arrivals, const ClusterConfig& cfg,
                 const LatencyModel& lm, std::mt19937_64& rng);

}  // namespace ksurf::cloudsim
