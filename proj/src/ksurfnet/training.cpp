#include "ksurf/ksurfnet/training.hpp"

#include "ksurf/harness/stats.hpp"
#include "ksurf/ksurfnet/noise_gradient.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ksurf::ksurfnet {

using estimator::StateEstimate;
using estimator::SystemModel;

namespace {

constexpr double kDivergenceLoss = 1e6;

void check_trace(const Trace& trace, const SystemModel& model) {
  if (trace.empty()) {
    throw ConfigError("ksurfnet: empty trace");
  }
  if (trace.dim() != model.measurement_dim()) {
    throw ConfigError("ksurfnet: trace has " + std::to_string(trace.dim()) + " columns, model expects " +
                      std::to_string(model.measurement_dim()));
  }
}

Vector diag_or_floor(const Matrix& m) {
  Vector d = m.diagonal();
  for (Index i = 0; i < d.size(); ++i) {
    d(i) = std::max(d(i), 1e-12);
  }
  return d;
}

/// Walks a filter with constant noise over the trace, reporting each step.
template <typename Fn>
void run_filter(const Trace& trace, const SystemModel& model, Fn&& on_step) {
  StateEstimate state = initial_state(model, trace.values.front());
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const StateEstimate prior = estimator::kf_predict(state, model);
    const Vector predicted = model.observe(prior.x);
    state = estimator::kf_update(prior, trace.values[k], model).estimate;
    on_step(k, predicted, state);
  }
}

std::vector<Matrix> window_batch(const std::vector<Vector>& inputs, std::size_t first_end, std::size_t count,
                                 int seq_len) {
  const Index dim = inputs.front().size();
  std::vector<Matrix> steps(static_cast<std::size_t>(seq_len), Matrix(dim, static_cast<Index>(count)));
  for (std::size_t b = 0; b < count; ++b) {
    const std::size_t end = first_end + b;  // window ends at this index
    for (int t = 0; t < seq_len; ++t) {
      steps[static_cast<std::size_t>(t)].col(static_cast<Index>(b)) =
          inputs[end + 1 - static_cast<std::size_t>(seq_len) + static_cast<std::size_t>(t)];
    }
  }
  return steps;
}

}  // namespace

TrainingSplit split_trace(std::size_t length, const LstmConfig& cfg) {
  TrainingSplit s;
  s.subset_end = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(length)));
  const auto val = static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(s.subset_end)));
  s.train_end = s.subset_end - val;
  const auto needed = static_cast<std::size_t>(cfg.seq_len) + 2;
  if (s.train_end < needed || val < 1) {
    throw ConfigError("ksurfnet: trace of length " + std::to_string(length) +
                      " is too short for the requested training split and sequence length");
  }
  return s;
}

StateEstimate initial_state(const SystemModel& model, const Vector& z0) {
  const Index n = model.state_dim();
  const Matrix H = model.observation_jacobian_at(Vector::Zero(n));
  StateEstimate s;
  s.x = H.completeOrthogonalDecomposition().solve(z0 - model.observe(Vector::Zero(n)));
  s.P = Matrix::Identity(n, n);
  return s;
}

std::vector<Vector> network_inputs(const Trace& trace, const SystemModel& model, LstmInput kind) {
  check_trace(trace, model);
  if (kind == LstmInput::Measurements) {
    return trace.values;
  }
  std::vector<Vector> out;
  out.reserve(trace.size());
  out.push_back(Vector::Zero(trace.dim()));
  run_filter(trace, model, [&](std::size_t k, const Vector& predicted, const StateEstimate&) {
    out.push_back(trace.values[k] - predicted);
  });
  return out;
}

TrainResult train_ksurfnet(const Trace& trace, const SystemModel& model, const LstmConfig& cfg,
                           const EpochCallback& on_epoch) {
  cfg.validate();
  model.validate();
  check_trace(trace, model);
  const TrainingSplit split = split_trace(trace.size(), cfg);
  const Trace subset = trace.slice(0, split.subset_end);
  const std::vector<Vector> inputs = network_inputs(subset, model, cfg.input);
  const auto L = static_cast<std::size_t>(cfg.seq_len);
  const Index p = model.measurement_dim();
  const Index n = model.state_dim();

  TrainResult result;
  result.net = KsurfNet(cfg, inputs.front().size(), p, n, cfg.seed);
  KsurfNet& net = result.net;
  const double sp0 = nn::softplus(0.0);
  net.output_scale.head(p) = diag_or_floor(model.R) / sp0;
  net.output_scale.tail(n) = diag_or_floor(model.Q) / sp0;

  // Input normalisation from the training range.
  {
    Matrix X(inputs.front().size(), static_cast<Index>(split.train_end));
    for (std::size_t k = 0; k < split.train_end; ++k) {
      X.col(static_cast<Index>(k)) = inputs[k];
    }
    net.input_shift = X.rowwise().mean();
    const Matrix centered = X.colwise() - net.input_shift;
    net.input_scale = (centered.rowwise().squaredNorm() / static_cast<double>(std::max<Index>(X.cols() - 1, 1)))
                          .cwiseSqrt();
    for (Index i = 0; i < net.input_scale.size(); ++i) {
      if (!(net.input_scale(i) > 1e-12)) {
        net.input_scale(i) = 1.0;
      }
    }
  }

  nn::AdamOptions adam_opts;
  adam_opts.learning_rate = cfg.learning_rate;
  adam_opts.beta1 = cfg.adam_beta1;
  adam_opts.beta2 = cfg.adam_beta2;
  adam_opts.eps = cfg.adam_eps;
  nn::Adam adam(net.parameters(), adam_opts);

  const std::size_t first = std::max<std::size_t>(L - 1, 1);
  const std::size_t last = split.train_end - 1;  // exclusive: step k needs z_{k+1}

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const KsurfNet stable = net;
    StateEstimate state = initial_state(model, subset.values.front());
    for (std::size_t k = 1; k < first; ++k) {
      state = estimator::kf_update(estimator::kf_predict(state, model), subset.values[k], model).estimate;
    }
    double total = 0.0;
    std::size_t count = 0;
    bool diverged = false;
    try {
      for (std::size_t k = first; k < last; k += static_cast<std::size_t>(cfg.batch)) {
        const std::size_t B = std::min<std::size_t>(static_cast<std::size_t>(cfg.batch), last - k);
        LstmCache cache;
        const Matrix raw = net.forward_batch(window_batch(inputs, k, B, cfg.seq_len), &cache);
        Matrix d_raw(raw.rows(), raw.cols());
        double batch_loss = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
          const Vector r = raw.col(static_cast<Index>(b));
          const NoiseEstimate noise = net.to_noise(r);
          const SystemModel m = model.with_noise(noise.Q, noise.R);
          const StepGradient g =
              prediction_loss_gradient(state, subset.values[k + b], subset.values[k + b + 1], m);
          state = g.posterior;
          batch_loss += g.loss;
          Vector d(raw.rows());
          d << g.d_r, g.d_q;
          d_raw.col(static_cast<Index>(b)) = d.cwiseProduct(net.transform_derivative(r)) / static_cast<double>(B);
        }
        total += batch_loss;
        count += B;
        if (!(batch_loss / static_cast<double>(B) <= kDivergenceLoss)) {
          diverged = true;
          break;
        }
        net.zero_grad();
        net.backward(cache, d_raw);
        for (nn::Parameter* prm : net.parameters()) {
          if (!prm->grad.allFinite()) {
            throw NumericalError("non-finite gradient");
          }
        }
        adam.step();
      }
    } catch (const NumericalError& e) {
      throw NumericalError("ksurfnet training aborted in epoch " + std::to_string(epoch) + ": " + e.what());
    }
    if (diverged) {
      net = stable;
      result.diverged = true;
      result.message = "loss exceeded 1e6 in epoch " + std::to_string(epoch) + "; kept parameters from epoch " +
                       std::to_string(epoch - 1);
      break;
    }
    result.epoch_loss.push_back(total / static_cast<double>(std::max<std::size_t>(count, 1)));
    result.epochs_run = epoch;
    if (on_epoch) {
      on_epoch(epoch, net);
    }
  }
  result.noise = average_noise(net, inputs, split.train_end, split.subset_end);
  return result;
}

NoiseEstimate average_noise(const KsurfNet& net, const std::vector<Vector>& inputs, std::size_t begin,
                            std::size_t end) {
  const auto L = static_cast<std::size_t>(net.config().seq_len);
  begin = std::max(begin, L - 1);
  end = std::min(end, inputs.size());
  if (begin >= end) {
    throw ConfigError("ksurfnet: no complete window in the averaging range");
  }
  const Matrix raw = net.forward_batch(window_batch(inputs, begin, end - begin, net.config().seq_len));
  Vector r = Vector::Zero(net.measurement_dim());
  Vector q = Vector::Zero(net.state_dim());
  for (Index b = 0; b < raw.cols(); ++b) {
    const NoiseEstimate e = net.to_noise(raw.col(b));
    r += e.R.diagonal();
    q += e.Q.diagonal();
  }
  return NoiseEstimate::diagonal(r / static_cast<double>(raw.cols()), q / static_cast<double>(raw.cols()));
}

double prediction_mae(const Trace& trace, const SystemModel& model, const NoiseEstimate& noise, std::size_t begin,
                      std::size_t end) {
  check_trace(trace, model);
  const SystemModel m = model.with_noise(noise.Q, noise.R);
  end = std::min(end, trace.size());
  begin = std::max<std::size_t>(begin, 1);
  if (begin >= end) {
    throw ConfigError("prediction_mae: empty range");
  }
  double total = 0.0;
  run_filter(trace.slice(0, end), m, [&](std::size_t k, const Vector& predicted, const StateEstimate&) {
    if (k >= begin) {
      total += (trace.values[k] - predicted).cwiseAbs().mean();
    }
  });
  return total / static_cast<double>(end - begin);
}

GridResult grid_search(const Trace& trace, const SystemModel& model, const LstmConfig& base,
                       std::vector<double> learning_rates, std::vector<int> epochs) {
  if (learning_rates.empty() || epochs.empty()) {
    throw ConfigError("grid_search: empty grid");
  }
  std::sort(learning_rates.begin(), learning_rates.end());
  learning_rates.erase(std::unique(learning_rates.begin(), learning_rates.end()), learning_rates.end());
  std::sort(epochs.begin(), epochs.end());
  epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
  if (epochs.front() < 0) {
    throw ConfigError("grid_search: epochs must be >= 0");
  }
  check_trace(trace, model);
  const TrainingSplit split = split_trace(trace.size(), base);
  const Trace subset = trace.slice(0, split.subset_end);
  const std::vector<Vector> inputs = network_inputs(subset, model, base.input);

  GridResult out;
  for (double lr : learning_rates) {
    LstmConfig cfg = base;
    cfg.learning_rate = lr;
    cfg.epochs = epochs.back();
    std::map<int, double> scores;
    auto score = [&](int epoch, const KsurfNet& net) {
      if (std::binary_search(epochs.begin(), epochs.end(), epoch)) {
        const NoiseEstimate noise = average_noise(net, inputs, split.train_end, split.subset_end);
        scores[epoch] = prediction_mae(subset, model, noise, split.train_end, split.subset_end);
      }
    };
    std::string error;
    try {
      const TrainResult r = train_ksurfnet(trace, model, cfg, score);
      if (epochs.front() == 0) {
        LstmConfig zero = cfg;
        zero.epochs = 0;
        score(0, train_ksurfnet(trace, model, zero).net);
      }
      if (r.diverged) {
        error = r.message;
      }
    } catch (const std::exception& e) {
      error = e.what();
    }
    for (int eps : epochs) {
      GridCell cell;
      cell.learning_rate = lr;
      cell.epochs = eps;
      const auto it = scores.find(eps);
      if (it != scores.end() && std::isfinite(it->second)) {
        cell.validation_mae = it->second;
      } else {
        cell.failed = true;
        cell.error = error.empty() ? "no score" : error;
      }
      out.cells.push_back(cell);
    }
  }

  const GridCell* best = nullptr;
  std::string failures;
  for (const GridCell& c : out.cells) {
    if (c.failed) {
      failures += "\n  lr=" + std::to_string(c.learning_rate) + " epochs=" + std::to_string(c.epochs) + ": " + c.error;
      continue;
    }
    if (!best || c.validation_mae < best->validation_mae) {
      best = &c;
    }
  }
  if (!best) {
    throw NumericalError("grid_search: every candidate failed:" + failures);
  }
  out.best = base;
  out.best.learning_rate = best->learning_rate;
  out.best.epochs = best->epochs;
  return out;
}

int DeltaSeries::negative_count() const {
  return static_cast<int>(std::count_if(deciles.begin(), deciles.end(), [](const DecileDelta& d) {
    return d.delta < 0.0;
  }));
}

DeltaSeries evaluate_deciles(const Trace& trace, const SystemModel& model, const NoiseEstimate& learned,
                             const NoiseEstimate& baseline) {
  check_trace(trace, model);
  if (trace.size() < 11) {
    throw ConfigError("evaluate_deciles: need at least 11 steps to form 10 chunks");
  }
  const bool truth = trace.has_truth();
  if (truth && trace.truth.front().size() != model.state_dim()) {
    throw ConfigError("evaluate_deciles: ground truth dimension does not match the state");
  }
  auto errors = [&](const NoiseEstimate& noise) {
    std::vector<double> e(trace.size(), 0.0);
    run_filter(trace, model.with_noise(noise.Q, noise.R),
               [&](std::size_t k, const Vector& predicted, const StateEstimate& post) {
                 e[k] = truth ? (post.x - trace.truth[k]).cwiseAbs().mean()
                              : (trace.values[k] - predicted).cwiseAbs().mean();
               });
    return e;
  };
  const std::vector<double> el = errors(learned);
  const std::vector<double> eb = errors(baseline);

  DeltaSeries out;
  const std::size_t M = trace.size() - 1;
  for (std::size_t i = 0; i < 10; ++i) {
    DecileDelta& d = out.deciles[i];
    d.begin = 1 + i * M / 10;
    d.end = 1 + (i + 1) * M / 10;
    std::vector<double> diff;
    std::vector<double> l;
    std::vector<double> b;
    for (std::size_t k = d.begin; k < d.end; ++k) {
      diff.push_back(el[k] - eb[k]);
      l.push_back(el[k]);
      b.push_back(eb[k]);
    }
    d.mae_learned = harness::mean(l);
    d.mae_baseline = harness::mean(b);
    d.delta = harness::mean(diff);
    if (diff.size() >= 2) {
      const harness::Interval ci = harness::confidence_interval(diff);
      d.lower = std::min(ci.lower, d.delta);
      d.upper = std::max(ci.upper, d.delta);
    } else {
      d.lower = d.upper = d.delta;
    }
  }
  return out;
}

}  // namespace ksurf::ksurfnet
