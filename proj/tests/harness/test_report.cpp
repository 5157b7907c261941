#include "ksurf/harness/report.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ksurf;
using namespace ksurf::harness;
using cloudsim::ScalerKind;
using cloudsim::TickMetrics;

namespace {

std::vector<TickMetrics> synthetic_ticks(int n, double latency_scale, int pods, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0);
  std::vector<TickMetrics> out;
  for (int i = 0; i < n; ++i) {
    TickMetrics m;
    m.tick = i;
    m.pods = pods + (i % 7 == 0);
    m.cpu = 0.25 + 0.001 * (i % 10);
    m.mem = 16.5;
    m.queue = i % 3;
    m.latency = 100.0 + latency_scale * e(rng);
    out.push_back(m);
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("run keys round-trip through file stems") {
  const RunKey a{ScalerKind::TH, 0.0005, 3};
  CHECK(a.stem() == "TH_t0.0005_seed3");
  const auto back = RunKey::from_stem(a.stem());
  REQUIRE(back.has_value());
  CHECK(*back == a);
  const RunKey b{ScalerKind::DRKF, std::nullopt, 12};
  CHECK(b.stem() == "DRKF_na_seed12");
  CHECK(*RunKey::from_stem(b.stem()) == b);
  CHECK_FALSE(RunKey::from_stem("HPA_na_seed1").has_value());
  CHECK_FALSE(RunKey::from_stem("report_summary").has_value());
}

TEST_CASE("tick csv round-trips at the written precision") {
  const auto ticks = synthetic_ticks(20, 30.0, 3, 1);
  std::stringstream ss;
  write_ticks_csv(ss, ticks);
  CHECK(ss.str().rfind("tick,pods,cpu,mem,queue,latency\n", 0) == 0);
  const auto back = read_ticks_csv(ss);
  REQUIRE(back.size() == ticks.size());
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    CHECK(back[i].pods == ticks[i].pods);
    CHECK(std::abs(back[i].latency - ticks[i].latency) <= 5e-5);
  }
  std::stringstream bad("tick,pods\n1,2\n");
  CHECK_THROWS_AS(read_ticks_csv(bad), ConfigError);
}

TEST_CASE("summary of a single run equals direct computation") {
  const std::vector<double> xs = {5.0, 1.0, 3.0, 9.0};
  const MetricSummary s = summarize("x", xs);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(mean(xs)));
  CHECK(s.stddev == doctest::Approx(stddev(xs)));
  CHECK(s.p90 == percentile(xs, 90));
  CHECK(s.ci.lower <= s.mean);
  CHECK(s.mean <= s.ci.upper);
  const MetricSummary one = summarize("y", {2.0});
  CHECK(one.ci.lower == 2.0);
  CHECK(one.ci.upper == 2.0);
}

TEST_CASE("run metrics follow the ticks") {
  const auto ticks = synthetic_ticks(500, 40.0, 4, 2);
  const RunMetrics m = run_metrics({ScalerKind::NA, std::nullopt, 1}, ticks);
  std::vector<double> lat;
  for (const auto& t : ticks) lat.push_back(t.latency);
  CHECK(m.latency_p99 == percentile(lat, 99));
  CHECK(m.latency_p90 <= m.latency_p95);
  CHECK(m.latency_p95 <= m.latency_p99);
  CHECK(m.latency_p95_var == doctest::Approx(variance(windowed_percentile(lat, 95, kTailWindow))));
  CHECK_FALSE(m.cum_regret.has_value());
}

TEST_CASE("paired comparison and reduction") {
  const PairedComparison c =
      compare_paired(ScalerKind::DR, ScalerKind::DRKF, std::nullopt, "pods_mean", {10, 12, 14}, {9, 12, 10});
  CHECK(c.pairs == 3);
  CHECK(c.candidate_lower == 2);
  CHECK(c.reduction == doctest::Approx((12.0 - 31.0 / 3.0) / 12.0));
  CHECK(c.diff_ci.lower <= c.candidate_mean - c.baseline_mean);
}

TEST_CASE("report groups, pairs and matches a brute-force variance reduction") {
  std::vector<RunMetrics> runs;
  double dr_var = 0.0, kf_var = 0.0;
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const auto dr = run_metrics({ScalerKind::DR, std::nullopt, seed}, synthetic_ticks(400, 80.0, 6, seed), 30.0);
    const auto kf = run_metrics({ScalerKind::DRKF, std::nullopt, seed}, synthetic_ticks(400, 40.0, 5, 100 + seed), 20.0);
    dr_var += dr.latency_p95_var;
    kf_var += kf.latency_p95_var;
    runs.push_back(dr);
    runs.push_back(kf);
  }
  const Report rep = build_report(runs);
  REQUIRE(rep.groups.size() == 2);
  CHECK(rep.groups[0].scaler == ScalerKind::DR);
  const PairedComparison* p95 = nullptr;
  for (const auto& c : rep.paired) {
    CHECK(c.baseline == ScalerKind::DR);
    CHECK(c.candidate == ScalerKind::DRKF);
    if (c.metric == "latency_p95_var") p95 = &c;
  }
  REQUIRE(p95 != nullptr);
  CHECK(p95->pairs == 6);
  CHECK(p95->reduction == doctest::Approx((dr_var - kf_var) / dr_var));
  for (const auto& g : rep.groups) {
    for (const auto& m : g.metrics) {
      CHECK(m.p90 <= m.p95);
      CHECK(m.p95 <= m.p99);
      CHECK(m.ci.lower <= m.mean + 1e-12);
      CHECK(m.mean <= m.ci.upper + 1e-12);
    }
  }
}

TEST_CASE("report on an empty directory fails") {
  TempDir dir("ksurf_report_empty");
  try {
    report_directory(dir.path);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("no results found") != std::string::npos);
  }
}

TEST_CASE("report over stored runs is a pure function of the files") {
  TempDir dir("ksurf_report_files");
  for (unsigned seed = 1; seed <= 3; ++seed) {
    for (ScalerKind k : {ScalerKind::TH, ScalerKind::KF}) {
      cloudsim::ScenarioResult r;
      r.ticks = synthetic_ticks(200, k == ScalerKind::TH ? 50.0 : 30.0, 3, seed + static_cast<unsigned>(k));
      write_run(dir.path, {k, 0.5, seed}, r);
    }
  }
  const Report first = report_directory(dir.path);
  const std::string a = slurp(dir.path / "report_summary.csv");
  const std::string b = slurp(dir.path / "report_paired.csv");
  const Report second = report_directory(dir.path);
  CHECK(slurp(dir.path / "report_summary.csv") == a);
  CHECK(slurp(dir.path / "report_paired.csv") == b);
  CHECK(first.paired.size() == second.paired.size());
  CHECK(b.find("TH,KF,0.5,latency_mean,3,") != std::string::npos);
  CHECK_FALSE(format_report(first).empty());
}
