#include "ksurf/harness/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace ksurf;
using namespace ksurf::harness;
using nlohmann::json;

TEST_CASE("full config parses") {
  const json doc = json::parse(R"({
    "name": "sweep",
    "scalers": ["TH", "KF"],
    "thresholds": [0.5, 1, 2, 4],
    "threshold_unit": "millipods",
    "seeds": {"first": 3, "count": 4},
    "horizon": 1200,
    "workload": {"poisson_rate": 0.125, "flash_crowds": [{"start": 100, "duration": 50, "amplitude": 4}]},
    "cluster": {"max_pods": 50, "initial_pods": 2},
    "latency": {"service_rate": 50, "noise_std": 5},
    "metrics": {"arrival_noise": 0.5, "cpu_noise": 0.001},
    "estimator": {"process_noise": 2, "ksurf": {"window": 6, "attention": {"enabled": false}},
                  "lstm": {"hidden_size": 8, "input": "innovations"}},
    "bandit": {"decision_interval": 5, "kernel": {"lengthscale": 0.5}},
    "sync_period": 10,
    "randomize_order": true,
    "order_seed": 9,
    "threads": 2
  })");
  const ExperimentConfig cfg = parse_experiment_config(doc);
  CHECK(cfg.name == "sweep");
  REQUIRE(cfg.scalers.size() == 2);
  CHECK(cfg.scalers[1] == cloudsim::ScalerKind::KF);
  REQUIRE(cfg.thresholds.size() == 4);
  CHECK(cfg.thresholds[0] == doctest::Approx(0.0005));
  CHECK(cfg.thresholds[3] == doctest::Approx(0.004));
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(cfg.scenario.workload.horizon == 1200);
  REQUIRE(cfg.scenario.workload.flash_crowds.size() == 1);
  CHECK(cfg.scenario.workload.flash_crowds[0].amplitude == 4.0);
  CHECK(cfg.scenario.cluster.max_pods == 50);
  CHECK(cfg.scenario.latency.service_rate == 50.0);
  CHECK(cfg.scenario.cpu_noise == 0.001);
  CHECK(cfg.scenario.estimator.process_noise == 2.0);
  CHECK(cfg.scenario.estimator.ksurf.window == 6);
  CHECK_FALSE(cfg.scenario.estimator.ksurf.attention.enabled);
  CHECK(cfg.scenario.estimator.lstm.input == ksurfnet::LstmInput::Innovations);
  CHECK(cfg.scenario.bandit.kernel.lengthscale == 0.5);
  CHECK(cfg.scenario.sync_period == 10);
  CHECK(cfg.randomize_order);
  CHECK(cfg.order_seed == 9);
  CHECK(cfg.threads == 2);
}

TEST_CASE("single scaler, threshold and seed forms") {
  const ExperimentConfig cfg = parse_experiment_config(json::parse(R"({"scaler": "TH", "threshold": 0.6, "seed": 8})"));
  CHECK(cfg.scalers == std::vector<cloudsim::ScalerKind>{cloudsim::ScalerKind::TH});
  CHECK(cfg.thresholds == std::vector<double>{0.6});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{8});
}

TEST_CASE("malformed configs are rejected with the offending key") {
  auto fails_with = [](const char* text, const char* needle) {
    try {
      parse_experiment_config(json::parse(text));
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
      return;
    }
    FAIL("expected a ConfigError for " << text);
  };
  fails_with(R"({"scaler": "NA", "seed": 1, "colour": 3})", "colour");
  fails_with(R"({"scaler": "NA", "seed": 1, "cluster": {"max_pod": 3}})", "cluster.max_pod");
  fails_with(R"({"scaler": "HPA", "seed": 1})", "HPA");
  fails_with(R"({"scaler": "NA"})", "seed");
  fails_with(R"({"scaler": "TH", "seed": 1})", "threshold");
  fails_with(R"({"scaler": "TH", "seed": 1, "thresholds": [0.5, -1]})", "positive");
  fails_with(R"({"scaler": "NA", "seed": 1, "threshold_unit": "cores"})", "threshold_unit");
  fails_with(R"({"scaler": "NA", "seed": 1, "horizon": "long"})", "horizon");
  fails_with(R"({"scaler": "NA", "seeds": []})", "seed");
}

TEST_CASE("config file with a relative trace path") {
  const auto dir = std::filesystem::temp_directory_path() / "ksurf_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "arrivals.csv") << "tick,arrivals\n0,1\n1,2\n2,3\n";
    std::ofstream(dir / "exp.json") << R"({"scaler": "NA", "seed": 1, "horizon": 6,
      "workload": {"trace": "arrivals.csv"}, "output_dir": "out"})";
  }
  const ExperimentConfig cfg = load_experiment_config(dir / "exp.json");
  CHECK(cfg.scenario.workload.trace_override == std::vector<double>{1, 2, 3});
  CHECK(cfg.output_dir == dir / "out");
  {
    std::ofstream(dir / "broken.json") << "{ not json";
  }
  CHECK_THROWS_AS(load_experiment_config(dir / "broken.json"), ConfigError);
  CHECK_THROWS_AS(load_experiment_config(dir / "missing.json"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("default config is the flash-crowd comparison") {
  const ExperimentConfig cfg = default_experiment_config();
  CHECK(cfg.seeds.size() == 20);
  CHECK(cfg.scalers.size() == 2);
  CHECK_NOTHROW(cfg.validate());
}
