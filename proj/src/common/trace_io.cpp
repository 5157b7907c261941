#include "ksurf/common/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

namespace ksurf {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    std::size_t lead = cell.find_first_not_of(' ');
    out.push_back(lead == std::string::npos ? std::string{} : cell.substr(lead));
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) {
    return false;
  }
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Trace Trace::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) {
    throw ConfigError("trace slice out of range");
  }
  Trace out;
  out.t.assign(t.begin() + static_cast<long>(begin), t.begin() + static_cast<long>(end));
  out.values.assign(values.begin() + static_cast<long>(begin), values.begin() + static_cast<long>(end));
  if (has_truth()) {
    out.truth.assign(truth.begin() + static_cast<long>(begin), truth.begin() + static_cast<long>(end));
  }
  return out;
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  std::vector<bool> is_truth;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') {
      continue;
    }
    auto cells = split_csv(line);
    if (!header_seen) {
      header_seen = true;
      double probe = 0.0;
      if (!parse_double(cells[0], probe)) {
        // Header row.
        if (cells.size() < 2) {
          throw ConfigError("trace header must have at least columns t,value");
        }
        for (std::size_t c = 1; c < cells.size(); ++c) {
          is_truth.push_back(cells[c].rfind("truth", 0) == 0);
        }
        continue;
      }
      is_truth.assign(cells.size() - 1, false);
    }
    if (cells.size() != is_truth.size() + 1) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": expected " +
                        std::to_string(is_truth.size() + 1) + " columns");
    }
    double tv = 0.0;
    if (!parse_double(cells[0], tv)) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": bad time value '" + cells[0] + "'");
    }
    std::vector<double> vals;
    std::vector<double> truth;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw ConfigError("trace line " + std::to_string(line_no) + ": bad value '" + cells[c] + "'");
      }
      (is_truth[c - 1] ? truth : vals).push_back(v);
    }
    if (vals.empty()) {
      throw ConfigError("trace has no value columns");
    }
    trace.t.push_back(tv);
    trace.values.push_back(Eigen::Map<Vector>(vals.data(), static_cast<Index>(vals.size())));
    if (!truth.empty()) {
      trace.truth.push_back(Eigen::Map<Vector>(truth.data(), static_cast<Index>(truth.size())));
    }
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open trace file " + path.string());
  }
  return read_trace_csv(in);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "t";
  for (Index i = 0; i < trace.dim(); ++i) {
    out << ",value" << i;
  }
  if (trace.has_truth()) {
    for (Index i = 0; i < trace.truth.front().size(); ++i) {
      out << ",truth" << i;
    }
  }
  out << '\n' << std::setprecision(10);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << trace.t[k];
    for (Index i = 0; i < trace.values[k].size(); ++i) {
      out << ',' << trace.values[k](i);
    }
    if (trace.has_truth()) {
      for (Index i = 0; i < trace.truth[k].size(); ++i) {
        out << ',' << trace.truth[k](i);
      }
    }
    out << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("cannot write trace file " + path.string());
  }
  write_trace_csv(out, trace);
}

Trace synthetic_random_walk(std::size_t n, double q, double r, std::uint64_t seed, double x0) {
  if (!(q >= 0.0) || !(r >= 0.0)) {
    throw ConfigError("synthetic_random_walk: noise variances must be >= 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  Trace t;
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    x += std::sqrt(q) * n01(rng);
    t.t.push_back(static_cast<double>(k));
    t.truth.push_back(Vector::Constant(1, x));
    t.values.push_back(Vector::Constant(1, x + std::sqrt(r) * n01(rng)));
  }
  return t;
}

}  // namespace ksurf
