// ksurf command-line front end.

#include "ksurf/common/trace.hpp"
#include "ksurf/estimator/ksurf.hpp"
#include "ksurf/harness/complexity.hpp"
#include "ksurf/harness/config.hpp"
#include "ksurf/harness/experiment.hpp"
#include "ksurf/harness/report.hpp"
#include "ksurf/ksurfnet/checkpoint.hpp"
#include "ksurf/ksurfnet/training.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ksurf;

namespace {

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scaler;
  std::optional<double> threshold;
  std::string threshold_unit = "fraction";
  int threads = -1;
  bool debug_gram = false;
  bool quiet = false;
};

int simulate(const SimulateArgs& a) {
  harness::ExperimentConfig cfg =
      a.config.empty() ? harness::default_experiment_config() : harness::load_experiment_config(a.config);
  if (a.seed) {
    cfg.seeds = {*a.seed};
  }
  if (!a.scaler.empty()) {
    cfg.scalers = {cloudsim::parse_scaler(a.scaler)};
  }
  if (a.threshold) {
    if (a.threshold_unit != "fraction" && a.threshold_unit != "millipods") {
      throw ConfigError("--threshold-unit must be 'fraction' or 'millipods'");
    }
    cfg.thresholds = {a.threshold_unit == "millipods" ? *a.threshold / 1000.0 : *a.threshold};
  }
  if (!a.out.empty()) {
    cfg.output_dir = a.out;
  }
  if (a.threads >= 0) {
    cfg.threads = a.threads;
  }
  cfg.validate();
  const harness::ExperimentResult res = harness::run_experiment(
      cfg, [&](const harness::RunKey& key, std::size_t done, std::size_t total) {
        if (!a.quiet) {
          std::cerr << fmt::format("[{}/{}] {}\n", done, total, key.stem());
        }
      });
  if (a.debug_gram) {
    for (const std::string& d : res.diagnostics) {
      std::cerr << d << '\n';
    }
  }
  std::cout << fmt::format("{} runs written to {}\n", res.runs.size(), cfg.output_dir.string());
  return 0;
}

struct TrainArgs {
  std::string trace;
  std::string config;
  std::string out = "ksurfnet_out";
  std::uint64_t seed = 1;
  std::size_t steps = 2000;
  double true_q = 0.1;
  double true_r = 1.0;
  double process_noise = 0.1;
  double measurement_noise = 10.0;
  std::optional<int> epochs;
  std::optional<int> hidden;
  std::optional<double> lr;
};

Trace load_or_make_trace(const std::string& path, std::size_t steps, double q, double r, std::uint64_t seed,
                         const fs::path& out, bool* synthetic) {
  if (!path.empty()) {
    *synthetic = false;
    return read_trace_csv(fs::path(path));
  }
  *synthetic = true;
  Trace t = synthetic_random_walk(steps, q, r, seed);
  write_trace_csv(out / "trace.csv", t);
  return t;
}

int train_ksurfnet_cmd(const TrainArgs& a) {
  ksurfnet::LstmConfig lstm;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) {
      throw ConfigError("cannot open config " + a.config);
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config " + a.config + " is not valid JSON: " + e.what());
    }
    harness::read_lstm_config(doc, lstm);
  }
  if (a.epochs) lstm.epochs = *a.epochs;
  if (a.hidden) lstm.hidden_size = *a.hidden;
  if (a.lr) lstm.learning_rate = *a.lr;
  lstm.seed = a.seed;
  lstm.validate();

  const fs::path out(a.out);
  fs::create_directories(out);
  bool synthetic = false;
  const Trace trace = load_or_make_trace(a.trace, a.steps, a.true_q, a.true_r, a.seed, out, &synthetic);
  if (trace.dim() != 1) {
    throw ConfigError("train-ksurfnet: the random-walk baseline needs a 1-D trace");
  }
  const auto baseline = estimator::SystemModel::random_walk(a.process_noise, a.measurement_noise);
  const ksurfnet::TrainResult res = ksurfnet::train_ksurfnet(trace, baseline, lstm, [&](int epoch, const auto&) {
    std::cerr << fmt::format("epoch {}/{}\n", epoch, lstm.epochs);
  });
  ksurfnet::save_checkpoint(out / "ksurfnet.ckpt", res.net);

  const std::size_t half = ksurfnet::split_trace(trace.size(), lstm).subset_end;
  const Trace test = trace.slice(half, trace.size());
  const ksurfnet::DeltaSeries d =
      ksurfnet::evaluate_deciles(test, baseline, res.noise, ksurfnet::NoiseEstimate{baseline.R, baseline.Q});
  std::ofstream csv(out / "deciles.csv", std::ios::binary);
  csv << "decile,begin,end,mae_baseline,mae_learned,delta,ci_lower,ci_upper\n";
  for (std::size_t i = 0; i < d.deciles.size(); ++i) {
    const auto& x = d.deciles[i];
    csv << fmt::format("{},{},{},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", i + 1, x.begin + half, x.end + half,
                       x.mae_baseline, x.mae_learned, x.delta, x.lower, x.upper);
  }
  std::ofstream loss(out / "loss.csv", std::ios::binary);
  loss << "epoch,loss\n";
  for (std::size_t i = 0; i < res.epoch_loss.size(); ++i) {
    loss << fmt::format("{},{:.9g}\n", i + 1, res.epoch_loss[i]);
  }
  std::cout << fmt::format("learned R={:.6g} Q={:.6g} (baseline R={:.6g} Q={:.6g}){}\n", res.noise.R(0, 0),
                           res.noise.Q(0, 0), baseline.R(0, 0), baseline.Q(0, 0), synthetic ? " on a synthetic trace" : "");
  std::cout << fmt::format("deciles with lower error than the baseline: {}/10\n", d.negative_count());
  if (res.diverged) {
    std::cout << "training diverged: " << res.message << '\n';
  }
  return 0;
}

struct AttentionArgs {
  std::string trace;
  std::string config;
  std::string out = "attention_out";
  std::uint64_t seed = 1;
  std::size_t steps = 2000;
  double true_q = 0.1;
  double true_r = 1.0;
  std::optional<int> epochs;
  std::optional<int> window;
};

int train_attention_cmd(const AttentionArgs& a) {
  estimator::KsurfOptions opts;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) {
      throw ConfigError("cannot open config " + a.config);
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config " + a.config + " is not valid JSON: " + e.what());
    }
    harness::read_ksurf_options(doc, opts);
  }
  if (a.epochs) opts.training.epochs = *a.epochs;
  if (a.window) opts.window = *a.window;
  opts.seed = a.seed;
  opts.training.seed = a.seed;

  const fs::path out(a.out);
  fs::create_directories(out);
  bool synthetic = false;
  const Trace trace = load_or_make_trace(a.trace, a.steps, a.true_q, a.true_r, a.seed, out, &synthetic);
  if (trace.dim() != 1) {
    throw ConfigError("train-attention: expected a 1-D trace");
  }
  std::vector<double> series;
  for (const Vector& v : trace.values) series.push_back(v(0));
  const estimator::KsurfAssets assets = estimator::prepare_scalar_ksurf(series, opts);
  estimator::save_attention(out / "attention.weights", *assets.attention);

  // Compare the filter with and without the attention stage.
  const auto model = estimator::SystemModel::random_walk(a.true_q, a.true_r);
  estimator::KsurfOptions plain = opts;
  plain.attention.enabled = false;
  estimator::KsurfAssets plain_assets = assets;
  plain_assets.attention = std::make_shared<estimator::AttentionNetwork>(plain.attention, 2, opts.seed);
  estimator::ScalarKsurf with(model, assets, opts, a.true_r);
  estimator::ScalarKsurf without(model, plain_assets, plain, a.true_r);
  std::ofstream csv(out / "denoise.csv", std::ios::binary);
  csv << "t,raw,ksurf,ekf" << (trace.has_truth() ? ",truth" : "") << '\n';
  double err_with = 0.0, err_without = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double z = trace.values[k](0);
    const double x1 = with.step(z);
    const double x0 = without.step(z);
    const double ref = trace.has_truth() ? trace.truth[k](0) : z;
    err_with += std::abs(x1 - ref);
    err_without += std::abs(x0 - ref);
    csv << fmt::format("{},{:.9g},{:.9g},{:.9g}", trace.t[k], z, x1, x0);
    if (trace.has_truth()) csv << fmt::format(",{:.9g}", trace.truth[k](0));
    csv << '\n';
  }
  const double n = static_cast<double>(trace.size());
  std::cout << fmt::format("mean abs error against {}: ksurf {:.6g}, ekf {:.6g}\n",
                           trace.has_truth() ? "truth" : "measurements", err_with / n, err_without / n);
  return 0;
}

int bench_cmd(const std::string& out, const std::vector<std::size_t>& sizes, int repeats) {
  harness::ComplexityOptions opts;
  if (!sizes.empty()) opts.sizes = sizes;
  opts.repeats = repeats;
  const auto rows = harness::bench_complexity(opts);
  if (out.empty() || out == "-") {
    harness::write_complexity_csv(std::cout, rows);
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) {
      throw ConfigError("cannot write " + out);
    }
    harness::write_complexity_csv(f, rows);
    std::cout << "wrote " << out << '\n';
  }
  return 0;
}

int report_cmd(const std::string& dir) {
  const harness::Report rep = harness::report_directory(dir);
  std::cout << harness::format_report(rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ksurf: filtered-context autoscaling simulator and estimators"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run a scenario config over its seeds");
  s->add_option("--config", sim.config, "experiment JSON; defaults to the DR vs DRKF flash-crowd set")
      ->check(CLI::ExistingFile);
  s->add_option("--seed", sim.seed, "run only this seed");
  s->add_option("--out", sim.out, "output directory");
  s->add_option("--scaler", sim.scaler, "DR, DRKF, DRRQ, KF, TH or NA");
  s->add_option("--threshold", sim.threshold, "CPU threshold for TH and KF");
  s->add_option("--threshold-unit", sim.threshold_unit, "fraction (default) or millipods");
  s->add_option("--threads", sim.threads, "worker threads, 0 = all cores");
  s->add_flag("--debug-gram", sim.debug_gram, "print GP gram diagnostics of bandit runs");
  s->add_flag("--quiet", sim.quiet, "no per-run progress");

  TrainArgs tr;
  auto* t = app.add_subcommand("train-ksurfnet", "fit the noise LSTM and compare deciles with the baseline filter");
  t->add_option("--trace", tr.trace, "trace CSV (t,value[,truth]); synthetic random walk when omitted")
      ->check(CLI::ExistingFile);
  t->add_option("--config", tr.config, "JSON with LSTM settings")->check(CLI::ExistingFile);
  t->add_option("--out", tr.out, "output directory");
  t->add_option("--seed", tr.seed, "network and synthetic-trace seed");
  t->add_option("--steps", tr.steps, "synthetic trace length");
  t->add_option("--true-q", tr.true_q, "synthetic process noise variance");
  t->add_option("--true-r", tr.true_r, "synthetic measurement noise variance");
  t->add_option("--process-noise", tr.process_noise, "baseline filter Q");
  t->add_option("--measurement-noise", tr.measurement_noise, "baseline filter R");
  t->add_option("--epochs", tr.epochs, "training epochs");
  t->add_option("--hidden", tr.hidden, "hidden units per layer");
  t->add_option("--lr", tr.lr, "Adam learning rate");

  AttentionArgs at;
  auto* w = app.add_subcommand("train-attention", "fit PCA and the attention smoother on a 1-D trace");
  w->add_option("--trace", at.trace, "trace CSV; synthetic random walk when omitted")->check(CLI::ExistingFile);
  w->add_option("--config", at.config, "JSON with Ksurf settings")->check(CLI::ExistingFile);
  w->add_option("--out", at.out, "output directory");
  w->add_option("--seed", at.seed, "seed");
  w->add_option("--steps", at.steps, "synthetic trace length");
  w->add_option("--true-q", at.true_q, "process noise variance (synthetic trace and filter)");
  w->add_option("--true-r", at.true_r, "measurement noise variance (synthetic trace and filter)");
  w->add_option("--epochs", at.epochs, "training epochs");
  w->add_option("--window", at.window, "attention window");

  std::string bench_out;
  std::vector<std::size_t> sizes;
  int repeats = 3;
  auto* b = app.add_subcommand("bench-complexity", "per-step time of GP refits vs Ksurf steps");
  b->add_option("--out", bench_out, "CSV path, stdout when omitted");
  b->add_option("--sizes", sizes, "history sizes")->delimiter(',');
  b->add_option("--repeats", repeats, "timing repeats (fastest kept)")->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* r = app.add_subcommand("report", "summaries and paired comparisons over a results directory");
  r->add_option("dir", report_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*s) return simulate(sim);
    if (*t) return train_ksurfnet_cmd(tr);
    if (*w) return train_attention_cmd(at);
    if (*b) return bench_cmd(bench_out, sizes, repeats);
    if (*r) return report_cmd(report_dir);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
