#include "ksurf/cloudsim/workload.hpp"

#include "ksurf/common/types.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ksurf::cloudsim {

void WorkloadSpec::validate() const {
  if (!(poisson_rate >= 0.0) || !std::isfinite(poisson_rate)) {
    throw ConfigError("workload: poisson_rate must be >= 0");
  }
  if (horizon < 1) {
    throw ConfigError("workload: horizon must be >= 1");
  }
  for (const FlashCrowd& f : flash_crowds) {
    if (f.start < 0 || f.duration < 0 || f.start + f.duration > horizon) {
      throw ConfigError("workload: flash crowd [" + std::to_string(f.start) + ", " +
                        std::to_string(f.start + f.duration) + ") lies outside the horizon");
    }
    if (!(f.amplitude >= 1.0)) {
      throw ConfigError("workload: flash crowd amplitude must be >= 1");
    }
  }
  for (double a : trace_override) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("workload: trace override holds a negative or non-finite count");
    }
  }
}

double WorkloadSpec::rate_at(long t) const {
  if (!trace_override.empty()) {
    return trace_override[static_cast<std::size_t>(t) % trace_override.size()];
  }
  double rate = poisson_rate;
  for (const FlashCrowd& f : flash_crowds) {
    if (t >= f.start && t < f.start + f.duration) {
      rate *= f.amplitude;
    }
  }
  return rate;
}

std::vector<double> generate_workload(const WorkloadSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<double> out(static_cast<std::size_t>(spec.horizon), 0.0);
  if (!spec.trace_override.empty()) {
    for (long t = 0; t < spec.horizon; ++t) {
      out[static_cast<std::size_t>(t)] = spec.rate_at(t);
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  for (long t = 0; t < spec.horizon; ++t) {
    const double rate = spec.rate_at(t);
    if (rate > 0.0) {
      std::poisson_distribution<long> p(rate);
      out[static_cast<std::size_t>(t)] = static_cast<double>(p(rng));
    }
  }
  return out;
}

std::vector<double> read_arrival_trace(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::stringstream ss(line);
    std::string tick;
    std::string value;
    if (!std::getline(ss, tick, ',') || !std::getline(ss, value)) {
      throw ConfigError("arrival trace line " + std::to_string(lineno) + ": expected tick,arrivals");
    }
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (value.find_first_not_of(" \t\r", used) != std::string::npos) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      if (out.empty() && lineno == 1) {
        continue;  // header
      }
      throw ConfigError("arrival trace line " + std::to_string(lineno) + ": bad number '" + value + "'");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("arrival trace line " + std::to_string(lineno) + ": arrivals must be finite and >= 0");
    }
    out.push_back(v);
  }
  if (out.empty()) {
    throw ConfigError("arrival trace is empty");
  }
  return out;
}

std::vector<double> read_arrival_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open arrival trace " + path.string());
  }
  return read_arrival_trace(in);
}

}  // namespace ksurf::cloudsim
