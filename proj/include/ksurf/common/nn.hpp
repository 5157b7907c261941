#pragma once

#include "ksurf/common/types.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace ksurf::nn {

/// A trainable tensor and its accumulated gradient.
struct Parameter {
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(Index rows, Index cols) : value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
  Index size() const { return value.size(); }
};

inline double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + e^x) without overflow.
inline double softplus(double x) {
  if (x > 30.0) {
    return x;
  }
  if (x < -30.0) {
    return std::exp(x);
  }
  return std::log1p(std::exp(x));
}

/// Uniform(-scale, scale) initialisation.
template <typename Rng>
void uniform_init(Matrix& m, double scale, Rng& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = dist(rng);
  }
}

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over a fixed set of parameters. The parameters must outlive the optimizer.
class Adam {
public:
  Adam(std::vector<Parameter*> params, AdamOptions opts) : params_(std::move(params)), opts_(opts) {
    for (const Parameter* p : params_) {
      m_.emplace_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.emplace_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Parameter& p = *params_[i];
      m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * p.grad;
      v_[i] = opts_.beta2 * v_[i] + (1.0 - opts_.beta2) * p.grad.cwiseAbs2();
      p.value.array() -=
          opts_.learning_rate * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + opts_.eps);
    }
  }

  void zero_grad() {
    for (Parameter* p : params_) {
      p->zero_grad();
    }
  }

  long steps() const { return t_; }

private:
  std::vector<Parameter*> params_;
  AdamOptions opts_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace ksurf::nn
