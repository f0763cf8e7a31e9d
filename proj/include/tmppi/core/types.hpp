#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tmppi {

inline constexpr int kMaxStateDim = 8;
inline constexpr int kMaxControlDim = 4;

// Fixed-capacity vectors: no heap traffic inside rollouts.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxStateDim, 1>;
using ControlInput = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxControlDim, 1>;

// Row i holds the control applied at step i of the horizon (H x m).
using ControlSequence = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Environment description fed to the transformer encoder.
using Context = Eigen::VectorXd;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidCovariance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-channel Gaussian noise variances (squared control units).
class DiagonalCovariance {
 public:
  DiagonalCovariance() = default;
  /// Throws InvalidCovariance unless every entry is finite and > 0.
  explicit DiagonalCovariance(ControlInput variances);

  const ControlInput& variances() const { return variances_; }
  ControlInput std_devs() const { return variances_.cwiseSqrt(); }
  ControlInput inverse() const { return variances_.cwiseInverse(); }
  int dim() const { return static_cast<int>(variances_.size()); }

 private:
  ControlInput variances_;
};

struct ControlBounds {
  ControlInput lo;
  ControlInput hi;

  int dim() const { return static_cast<int>(lo.size()); }
  ControlInput clamp(const ControlInput& u) const { return u.cwiseMax(lo).cwiseMin(hi); }
  void clamp_rows(ControlSequence& seq) const;
  void validate() const;
};

/// Wraps an angle into (-pi, pi]. Throws std::domain_error on non-finite input.
double wrap_angle(double a);

}  // namespace tmppi
