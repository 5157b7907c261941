#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ksurf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Raised for inconsistent dimensions, invalid hyperparameters and malformed inputs.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a numerical routine cannot proceed (singular systems, NaNs).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace ksurf
