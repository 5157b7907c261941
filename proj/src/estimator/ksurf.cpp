#include "ksurf/estimator/ksurf.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ksurf::estimator {

MeasurementWindow::MeasurementWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw ConfigError("measurement window capacity must be >= 1");
  }
}

void MeasurementWindow::push(const Vector& z) {
  if (!entries_.empty() && z.size() != dim()) {
    throw ConfigError("measurement window: entry dimension " + std::to_string(z.size()) + " != " +
                      std::to_string(dim()));
  }
  if (entries_.size() == capacity_) {
    entries_.pop_front();
  }
  entries_.push_back(z);
}

const Vector& MeasurementWindow::back() const {
  if (entries_.empty()) {
    throw ConfigError("measurement window is empty");
  }
  return entries_.back();
}

Matrix MeasurementWindow::as_matrix() const {
  Matrix m(dim(), static_cast<Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    m.col(static_cast<Index>(i)) = entries_[i];
  }
  return m;
}

Vector denoise(const MeasurementWindow& window, const AttentionNetwork& net, const PcaBasis& basis) {
  if (window.empty()) {
    throw ConfigError("ksurf: measurement window is empty");
  }
  if (!net.config().enabled) {
    return window.back();
  }
  const bool project = basis.k() > 0;
  Matrix tokens = window.as_matrix();
  if (project) {
    if (basis.dim() != window.dim()) {
      throw ConfigError("ksurf: PCA basis dimension does not match measurements");
    }
    tokens = basis.components * (tokens.colwise() - basis.mean);
  }
  const Vector y = attention_filter(tokens, net);
  return project ? basis.reconstruct(y) : y;
}

StateEstimate ksurf_step(const MeasurementWindow& window, const StateEstimate& state, const SystemModel& model,
                         const AttentionNetwork& net, const PcaBasis& basis) {
  const Vector z = denoise(window, net, basis);
  const StateEstimate prior = kf_predict(state, model);
  return kf_update(prior, z, model).estimate;
}

std::vector<Vector> lift_series(const std::vector<double>& series, int width) {
  if (width < 1) {
    throw ConfigError("lift width must be >= 1");
  }
  std::vector<Vector> out;
  out.reserve(series.size());
  double running = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= static_cast<std::size_t>(width)) {
      running -= series[i - static_cast<std::size_t>(width)];
    }
    const std::size_t count = std::min(i + 1, static_cast<std::size_t>(width));
    Vector v(2);
    v << series[i], running / static_cast<double>(count);
    out.push_back(std::move(v));
  }
  return out;
}

KsurfAssets prepare_scalar_ksurf(const std::vector<double>& history, const KsurfOptions& opts) {
  KsurfAssets assets;
  const auto lifted = lift_series(history, opts.lift_width);
  if (lifted.size() >= 2) {
    assets.basis = fit_pca(lifted, opts.pca_components);
  } else {
    assets.basis = PcaBasis::identity(2);
  }
  const Index token_dim = assets.basis.k() > 0 ? assets.basis.k() : 2;
  AttentionConfig cfg = opts.attention;
  if (!cfg.enabled) {
    auto net = std::make_shared<AttentionNetwork>(cfg, token_dim, opts.seed);
    assets.attention = std::move(net);
    return assets;
  }
  auto net = std::make_shared<AttentionNetwork>(cfg, token_dim, opts.seed);
  std::vector<Vector> tokens;
  tokens.reserve(lifted.size());
  for (const Vector& v : lifted) {
    tokens.push_back(assets.basis.k() > 0 ? assets.basis.project(v) : v);
  }
  AttentionTrainOptions train = opts.training;
  train.window = opts.window;
  train_attention(*net, tokens, train);
  assets.attention = std::move(net);
  return assets;
}

ScalarKsurf::ScalarKsurf(SystemModel model, KsurfAssets assets, const KsurfOptions& opts, double initial_variance)
    : model_(std::move(model)),
      assets_(std::move(assets)),
      window_(static_cast<std::size_t>(std::max(1, opts.window))),
      lift_width_(opts.lift_width),
      initial_variance_(initial_variance) {
  if (model_.state_dim() != 1 || model_.measurement_dim() != 1) {
    throw ConfigError("ScalarKsurf needs a 1-D state and measurement model");
  }
  if (!assets_.attention) {
    throw ConfigError("ScalarKsurf needs an attention network (possibly disabled)");
  }
  if (lift_width_ < 1) {
    throw ConfigError("lift width must be >= 1");
  }
}

double ScalarKsurf::step(double z) {
  if (!std::isfinite(z)) {
    return initialised_ ? state_.x(0) : 0.0;
  }
  recent_.push_back(z);
  if (recent_.size() > static_cast<std::size_t>(lift_width_)) {
    recent_.pop_front();
  }
  Vector lifted(2);
  lifted << z, std::accumulate(recent_.begin(), recent_.end(), 0.0) / static_cast<double>(recent_.size());
  window_.push(lifted);

  const Vector filtered = denoise(window_, *assets_.attention, assets_.basis);
  Vector meas(1);
  meas << filtered(0);
  if (!initialised_) {
    state_.x = meas;
    state_.P = Matrix::Constant(1, 1, initial_variance_);
    state_.step = 0;
    initialised_ = true;
  }
  const StateEstimate prior = kf_predict(state_, model_);
  state_ = kf_update(prior, meas, model_).estimate;
  return state_.x(0);
}

}  // namespace ksurf::estimator
