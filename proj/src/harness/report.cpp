#include "ksurf/harness/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace ksurf::harness {

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

int baseline_rank(cloudsim::ScalerKind k) {
  using cloudsim::ScalerKind;
  switch (k) {
    case ScalerKind::NA: return 0;
    case ScalerKind::TH: return 1;
    case ScalerKind::KF: return 2;
    case ScalerKind::DR: return 3;
    case ScalerKind::DRKF: return 4;
    case ScalerKind::DRRQ: return 5;
  }
  return 6;
}

std::string threshold_text(const std::optional<double>& t) { return t ? format_threshold(*t) : "na"; }

}  // namespace

MetricSummary summarize(const std::string& name, const std::vector<double>& samples) {
  if (samples.empty()) {
    throw ConfigError("summarize '" + name + "': no samples");
  }
  MetricSummary s;
  s.name = name;
  s.n = samples.size();
  s.mean = mean(samples);
  s.stddev = stddev(samples);
  s.ci = samples.size() >= 2 ? confidence_interval(samples) : Interval{s.mean, s.mean};
  s.p90 = percentile(samples, 90);
  s.p95 = percentile(samples, 95);
  s.p99 = percentile(samples, 99);
  return s;
}

RunMetrics run_metrics(const RunKey& key, const std::vector<cloudsim::TickMetrics>& ticks,
                       std::optional<double> cum_regret) {
  if (ticks.empty()) {
    throw ConfigError("run " + key.stem() + " has no ticks");
  }
  std::vector<double> lat, pods, cpu, mem;
  for (const cloudsim::TickMetrics& t : ticks) {
    lat.push_back(t.latency);
    pods.push_back(t.pods);
    cpu.push_back(t.cpu);
    mem.push_back(t.mem);
  }
  RunMetrics m;
  m.key = key;
  m.ticks = ticks.size();
  m.latency_mean = mean(lat);
  m.latency_std = stddev(lat);
  m.latency_p90 = percentile(lat, 90);
  m.latency_p95 = percentile(lat, 95);
  m.latency_p99 = percentile(lat, 99);
  m.latency_p95_var = variance(windowed_percentile(lat, 95, kTailWindow));
  m.latency_p99_var = variance(windowed_percentile(lat, 99, kTailWindow));
  m.pods_mean = mean(pods);
  m.pods_var = variance(pods);
  m.cpu_mean = mean(cpu);
  m.cpu_std = stddev(cpu);
  m.mem_mean = mean(mem);
  m.mem_std = stddev(mem);
  m.cum_regret = cum_regret;
  return m;
}

const std::vector<std::string>& run_metric_names() {
  static const std::vector<std::string> names = {
      "latency_mean",    "latency_std", "latency_p90", "latency_p95", "latency_p99",
      "latency_p95_var", "latency_p99_var", "pods_mean", "pods_var",   "cpu_mean",
      "cpu_std",         "mem_mean",    "mem_std",     "cum_regret"};
  return names;
}

std::optional<double> metric_value(const RunMetrics& m, const std::string& name) {
  if (name == "latency_mean") return m.latency_mean;
  if (name == "latency_std") return m.latency_std;
  if (name == "latency_p90") return m.latency_p90;
  if (name == "latency_p95") return m.latency_p95;
  if (name == "latency_p99") return m.latency_p99;
  if (name == "latency_p95_var") return m.latency_p95_var;
  if (name == "latency_p99_var") return m.latency_p99_var;
  if (name == "pods_mean") return m.pods_mean;
  if (name == "pods_var") return m.pods_var;
  if (name == "cpu_mean") return m.cpu_mean;
  if (name == "cpu_std") return m.cpu_std;
  if (name == "mem_mean") return m.mem_mean;
  if (name == "mem_std") return m.mem_std;
  if (name == "cum_regret") return m.cum_regret;
  throw ConfigError("unknown metric '" + name + "'");
}

void write_summary_csv(std::ostream& out, const std::vector<RunMetrics>& runs) {
  std::string buf = "scaler,threshold,seed,ticks";
  for (const std::string& n : run_metric_names()) {
    buf += "," + n;
  }
  buf += "\n";
  for (const RunMetrics& r : runs) {
    buf += fmt::format("{},{},{},{}", cloudsim::to_string(r.key.scaler), threshold_text(r.key.threshold), r.key.seed,
                       r.ticks);
    for (const std::string& n : run_metric_names()) {
      const auto v = metric_value(r, n);
      buf += "," + (v ? num(*v) : std::string());
    }
    buf += "\n";
  }
  out << buf;
}

PairedComparison compare_paired(cloudsim::ScalerKind baseline, cloudsim::ScalerKind candidate,
                                std::optional<double> threshold, const std::string& metric,
                                const std::vector<double>& base, const std::vector<double>& cand) {
  if (base.size() != cand.size() || base.empty()) {
    throw ConfigError("compare_paired: need equally many, and at least one, paired samples");
  }
  PairedComparison c;
  c.baseline = baseline;
  c.candidate = candidate;
  c.threshold = threshold;
  c.metric = metric;
  c.pairs = base.size();
  c.baseline_mean = mean(base);
  c.candidate_mean = mean(cand);
  std::vector<double> diff;
  for (std::size_t i = 0; i < base.size(); ++i) {
    diff.push_back(cand[i] - base[i]);
    c.candidate_lower += cand[i] < base[i];
  }
  const double d = mean(diff);
  c.diff_ci = diff.size() >= 2 ? confidence_interval(diff) : Interval{d, d};
  c.reduction = c.baseline_mean != 0.0 ? (c.baseline_mean - c.candidate_mean) / c.baseline_mean : 0.0;
  return c;
}

Report build_report(const std::vector<RunMetrics>& runs) {
  if (runs.empty()) {
    throw ConfigError("no results found");
  }
  // (scaler, threshold label) -> seed -> run
  using GroupKey = std::pair<cloudsim::ScalerKind, std::string>;
  std::map<GroupKey, std::map<std::uint64_t, const RunMetrics*>> groups;
  std::map<GroupKey, std::optional<double>> thresholds;
  for (const RunMetrics& r : runs) {
    const GroupKey k{r.key.scaler, r.key.threshold_label()};
    if (!groups[k].emplace(r.key.seed, &r).second) {
      throw ConfigError("duplicate run " + r.key.stem());
    }
    thresholds[k] = r.key.threshold;
  }

  Report rep;
  for (const auto& [k, by_seed] : groups) {
    GroupSummary g;
    g.scaler = k.first;
    g.threshold = thresholds[k];
    for (const std::string& name : run_metric_names()) {
      std::vector<double> values;
      for (const auto& [seed, run] : by_seed) {
        if (const auto v = metric_value(*run, name)) {
          values.push_back(*v);
        }
      }
      if (values.size() == by_seed.size()) {
        g.metrics.push_back(summarize(name, values));
      }
    }
    rep.groups.push_back(std::move(g));
  }
  std::sort(rep.groups.begin(), rep.groups.end(), [](const GroupSummary& a, const GroupSummary& b) {
    if (a.scaler != b.scaler) return baseline_rank(a.scaler) < baseline_rank(b.scaler);
    return a.threshold.value_or(-1.0) < b.threshold.value_or(-1.0);
  });

  for (const auto& [kb, base_runs] : groups) {
    for (const auto& [kc, cand_runs] : groups) {
      if (kb.second != kc.second || baseline_rank(kb.first) >= baseline_rank(kc.first)) {
        continue;
      }
      for (const std::string& name : run_metric_names()) {
        std::vector<double> b, c;
        for (const auto& [seed, run] : base_runs) {
          const auto it = cand_runs.find(seed);
          if (it == cand_runs.end()) {
            continue;
          }
          const auto vb = metric_value(*run, name);
          const auto vc = metric_value(*it->second, name);
          if (vb && vc) {
            b.push_back(*vb);
            c.push_back(*vc);
          }
        }
        if (!b.empty()) {
          rep.paired.push_back(compare_paired(kb.first, kc.first, thresholds[kb], name, b, c));
        }
      }
    }
  }
  std::stable_sort(rep.paired.begin(), rep.paired.end(), [](const PairedComparison& a, const PairedComparison& b) {
    if (a.baseline != b.baseline) return baseline_rank(a.baseline) < baseline_rank(b.baseline);
    if (a.candidate != b.candidate) return baseline_rank(a.candidate) < baseline_rank(b.candidate);
    return a.threshold.value_or(-1.0) < b.threshold.value_or(-1.0);
  });
  return rep;
}

void write_group_csv(std::ostream& out, const Report& report) {
  std::string buf = "scaler,threshold,metric,n,mean,std,ci_lower,ci_upper,p90,p95,p99\n";
  for (const GroupSummary& g : report.groups) {
    for (const MetricSummary& m : g.metrics) {
      buf += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", cloudsim::to_string(g.scaler),
                         threshold_text(g.threshold), m.name, m.n, num(m.mean), num(m.stddev), num(m.ci.lower),
                         num(m.ci.upper), num(m.p90), num(m.p95), num(m.p99));
    }
  }
  out << buf;
}

void write_paired_csv(std::ostream& out, const Report& report) {
  std::string buf =
      "baseline,candidate,threshold,metric,pairs,baseline_mean,candidate_mean,diff_ci_lower,diff_ci_upper,"
      "candidate_lower,reduction\n";
  for (const PairedComparison& c : report.paired) {
    buf += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", cloudsim::to_string(c.baseline),
                       cloudsim::to_string(c.candidate), threshold_text(c.threshold), c.metric, c.pairs,
                       num(c.baseline_mean), num(c.candidate_mean), num(c.diff_ci.lower), num(c.diff_ci.upper),
                       c.candidate_lower, num(c.reduction));
  }
  out << buf;
}

Report report_directory(const std::filesystem::path& dir) {
  const std::vector<StoredRun> stored = load_runs(dir);
  if (stored.empty()) {
    throw ConfigError("no results found in " + dir.string());
  }
  std::vector<RunMetrics> runs;
  runs.reserve(stored.size());
  for (const StoredRun& s : stored) {
    runs.push_back(run_metrics(s.key, s.ticks, s.cum_regret));
  }
  Report rep = build_report(runs);
  std::ofstream groups(dir / "report_summary.csv", std::ios::binary);
  std::ofstream paired(dir / "report_paired.csv", std::ios::binary);
  if (!groups || !paired) {
    throw ConfigError("cannot write report files in " + dir.string());
  }
  write_group_csv(groups, rep);
  write_paired_csv(paired, rep);
  return rep;
}

std::string format_report(const Report& report) {
  std::string out;
  for (const GroupSummary& g : report.groups) {
    out += fmt::format("{} threshold={}\n", cloudsim::to_string(g.scaler), threshold_text(g.threshold));
    for (const MetricSummary& m : g.metrics) {
      out += fmt::format("  {:<16} n={:<3} mean={:<12.6g} std={:<12.6g} ci=[{:.6g}, {:.6g}]\n", m.name, m.n, m.mean,
                         m.stddev, m.ci.lower, m.ci.upper);
    }
  }
  const std::set<std::string> headline = {"latency_p95_var", "latency_p99_var", "pods_mean", "latency_mean",
                                          "cum_regret"};
  for (const PairedComparison& c : report.paired) {
    if (!headline.count(c.metric)) {
      continue;
    }
    out += fmt::format("{} vs {} threshold={} {:<16} pairs={} lower_in={}/{} reduction={:+.1f}%\n",
                       cloudsim::to_string(c.candidate), cloudsim::to_string(c.baseline), threshold_text(c.threshold),
                       c.metric, c.pairs, c.candidate_lower, c.pairs, 100.0 * c.reduction);
  }
  return out;
}

}  // namespace ksurf::harness
