#include "ksurf/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

namespace ksurf::harness {

std::vector<RunSpec> plan_runs(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<RunSpec> plan;
  for (cloudsim::ScalerKind k : cfg.scalers) {
    const bool uses_threshold = k == cloudsim::ScalerKind::TH || k == cloudsim::ScalerKind::KF;
    std::vector<std::optional<double>> thresholds;
    if (uses_threshold) {
      thresholds.assign(cfg.thresholds.begin(), cfg.thresholds.end());
    } else {
      thresholds.push_back(std::nullopt);
    }
    for (const auto& t : thresholds) {
      for (std::uint64_t seed : cfg.seeds) {
        RunSpec r;
        r.key = RunKey{k, t, seed};
        r.config = cfg.scenario;
        r.config.scaler = k;
        r.config.seed = seed;
        if (t) {
          r.config.threshold = *t;
        }
        plan.push_back(std::move(r));
      }
    }
  }
  std::sort(plan.begin(), plan.end(), [](const RunSpec& a, const RunSpec& b) { return a.key < b.key; });
  for (std::size_t i = 1; i < plan.size(); ++i) {
    if (plan[i].key == plan[i - 1].key) {
      throw ConfigError("experiment: duplicate run " + plan[i].key.stem());
    }
  }
  if (cfg.randomize_order) {
    std::mt19937_64 rng(cfg.order_seed);
    // Fisher-Yates with our own index draws so the order does not depend on the library's shuffle.
    for (std::size_t i = plan.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(plan[i - 1], plan[pick(rng)]);
    }
  }
  return plan;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  const std::vector<RunSpec> plan = plan_runs(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  {
    std::ofstream order(cfg.output_dir / "order.csv", std::ios::binary);
    order << "index,run\n";
    for (std::size_t i = 0; i < plan.size(); ++i) {
      order << i << ',' << plan[i].key.stem() << '\n';
    }
  }

  bool need_assets = false;
  bool need_lstm = false;
  for (cloudsim::ScalerKind k : cfg.scalers) {
    need_assets |= k == cloudsim::ScalerKind::KF || k == cloudsim::ScalerKind::DRKF || k == cloudsim::ScalerKind::DRRQ;
    need_lstm |= k == cloudsim::ScalerKind::DRRQ;
  }
  std::optional<cloudsim::ScenarioAssets> assets;
  if (need_assets) {
    assets = cloudsim::prepare_assets(plan.front().config, need_lstm);
  }

  std::vector<std::optional<RunMetrics>> metrics(plan.size());
  std::vector<std::string> diagnostics(plan.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) {
        return;
      }
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) {
          return;
        }
      }
      try {
        const RunSpec& spec = plan[i];
        const cloudsim::ScenarioResult r = cloudsim::run_scenario(spec.config, assets ? &*assets : nullptr);
        write_run(cfg.output_dir, spec.key, r);
        metrics[i] = run_metrics(spec.key, r.ticks,
                                 r.regret ? std::optional<double>(r.regret->cumulative()) : std::nullopt);
        if (!r.diagnostics.empty()) {
          diagnostics[i] = spec.key.stem() + ": " + r.diagnostics;
        }
        std::lock_guard<std::mutex> lock(mu);
        ++done;
        if (progress) {
          progress(spec.key, done, plan.size());
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) {
          failure = std::current_exception();
        }
        return;
      }
    }
  };

  std::size_t n_threads = cfg.threads > 0 ? static_cast<std::size_t>(cfg.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, plan.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back(worker);
  }
  for (std::thread& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  ExperimentResult out;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    out.runs.push_back(*metrics[i]);
    if (!diagnostics[i].empty()) {
      out.diagnostics.push_back(diagnostics[i]);
    }
  }
  std::sort(out.runs.begin(), out.runs.end(), [](const RunMetrics& a, const RunMetrics& b) { return a.key < b.key; });
  std::sort(out.diagnostics.begin(), out.diagnostics.end());
  std::ofstream summary(cfg.output_dir / "summary.csv", std::ios::binary);
  if (!summary) {
    throw ConfigError("cannot write summary.csv in " + cfg.output_dir.string());
  }
  write_summary_csv(summary, out.runs);
  return out;
}

}  // namespace ksurf::harness
