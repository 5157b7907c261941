#include "ksurf/harness/results_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace ksurf::harness {

namespace {

constexpr const char* kTicksHeader = "tick,pods,cpu,mem,queue,latency";
constexpr const char* kRegretHeader = "round,chosen,oracle_reward,chosen_reward,cum_regret,rho";
constexpr const char* kTicksSuffix = ".ticks.csv";
constexpr const char* kRegretSuffix = ".regret.csv";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(cell);
  }
  return out;
}

double to_double(const std::string& s, const std::string& what, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError(what + " line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

void expect_header(std::istream& in, const char* header, const std::string& what) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ConfigError(what + ": expected header '" + header + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  return out;
}

}  // namespace

std::string format_threshold(double t) { return fmt::format("{}", t); }

std::string RunKey::threshold_label() const { return threshold ? format_threshold(*threshold) : "na"; }

std::string RunKey::stem() const {
  return fmt::format("{}_{}_seed{}", cloudsim::to_string(scaler), threshold ? "t" + threshold_label() : "na", seed);
}

std::optional<RunKey> RunKey::from_stem(const std::string& stem) {
  static const std::regex re(R"(^([A-Z]+)_(na|t[0-9.eE+-]+)_seed([0-9]+)$)");
  std::smatch m;
  if (!std::regex_match(stem, m, re)) {
    return std::nullopt;
  }
  RunKey key;
  try {
    key.scaler = cloudsim::parse_scaler(m[1].str());
  } catch (const ConfigError&) {
    return std::nullopt;
  }
  if (m[2].str() != "na") {
    const std::string t = m[2].str().substr(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
      return std::nullopt;
    }
    key.threshold = v;
  }
  const std::string s = m[3].str();
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), key.seed);
  if (ec != std::errc{}) {
    return std::nullopt;
  }
  return key;
}

bool operator<(const RunKey& a, const RunKey& b) {
  const double ta = a.threshold.value_or(-1.0);
  const double tb = b.threshold.value_or(-1.0);
  if (a.scaler != b.scaler) return a.scaler < b.scaler;
  if (ta != tb) return ta < tb;
  return a.seed < b.seed;
}

bool operator==(const RunKey& a, const RunKey& b) {
  return a.scaler == b.scaler && a.threshold == b.threshold && a.seed == b.seed;
}

void write_ticks_csv(std::ostream& out, const std::vector<cloudsim::TickMetrics>& ticks) {
  std::string buf = fmt::format("{}\n", kTicksHeader);
  for (const cloudsim::TickMetrics& m : ticks) {
    fmt::format_to(std::back_inserter(buf), "{},{},{:.6f},{:.4f},{:.4f},{:.4f}\n", m.tick, m.pods, m.cpu, m.mem,
                   m.queue, m.latency);
  }
  out << buf;
}

std::vector<cloudsim::TickMetrics> read_ticks_csv(std::istream& in, const std::string& what) {
  expect_header(in, kTicksHeader, what);
  std::vector<cloudsim::TickMetrics> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw ConfigError(what + " line " + std::to_string(lineno) + ": expected 6 columns");
    }
    cloudsim::TickMetrics m;
    m.tick = static_cast<long>(to_double(cells[0], what, lineno));
    m.pods = static_cast<int>(to_double(cells[1], what, lineno));
    m.cpu = to_double(cells[2], what, lineno);
    m.mem = to_double(cells[3], what, lineno);
    m.queue = to_double(cells[4], what, lineno);
    m.latency = to_double(cells[5], what, lineno);
    out.push_back(m);
  }
  return out;
}

void write_regret_csv(std::ostream& out, const bandit::RegretTrace& trace) {
  std::string buf = fmt::format("{}\n", kRegretHeader);
  for (const bandit::RegretRound& r : trace.rounds()) {
    fmt::format_to(std::back_inserter(buf), "{},{},{:.9g},{:.9g},{:.9g},{:.9g}\n", r.round, r.chosen,
                   r.oracle_reward, r.chosen_reward, r.cum_regret, r.rho);
  }
  out << buf;
}

double read_final_regret(std::istream& in, const std::string& what) {
  expect_header(in, kRegretHeader, what);
  std::string line;
  std::size_t lineno = 1;
  double last = 0.0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    const auto cells = split_csv(line);
    if (cells.size() != 6) {
      throw ConfigError(what + " line " + std::to_string(lineno) + ": expected 6 columns");
    }
    last = to_double(cells[4], what, lineno);
  }
  return last;
}

void write_run(const std::filesystem::path& dir, const RunKey& key, const cloudsim::ScenarioResult& result) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / (key.stem() + kTicksSuffix));
    write_ticks_csv(out, result.ticks);
  }
  if (result.regret) {
    auto out = open_out(dir / (key.stem() + kRegretSuffix));
    write_regret_csv(out, *result.regret);
  }
}

std::vector<StoredRun> load_runs(const std::filesystem::path& dir) {
  std::vector<StoredRun> runs;
  if (!std::filesystem::is_directory(dir)) {
    return runs;
  }
  const std::string suffix = kTicksSuffix;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.size() <= suffix.size() ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
      continue;
    }
    const std::string stem = name.substr(0, name.size() - suffix.size());
    const auto key = RunKey::from_stem(stem);
    if (!key) {
      continue;
    }
    StoredRun run;
    run.key = *key;
    std::ifstream in(entry.path());
    run.ticks = read_ticks_csv(in, name);
    const auto regret_path = dir / (stem + kRegretSuffix);
    if (std::filesystem::exists(regret_path)) {
      std::ifstream rin(regret_path);
      run.cum_regret = read_final_regret(rin, regret_path.filename().string());
    }
    runs.push_back(std::move(run));
  }
  std::sort(runs.begin(), runs.end(), [](const StoredRun& a, const StoredRun& b) { return a.key < b.key; });
  return runs;
}

}  // namespace ksurf::harness
