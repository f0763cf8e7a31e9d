#include "tmppi/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tmppi {

DiagonalCovariance::DiagonalCovariance(ControlInput variances) : variances_(std::move(variances)) {
  if (variances_.size() == 0) throw InvalidCovariance("covariance has no channels");
  for (int i = 0; i < variances_.size(); ++i) {
    if (!std::isfinite(variances_[i]) || variances_[i] <= 0.0) {
      throw InvalidCovariance("covariance entry " + std::to_string(i) + " must be finite and > 0, got " +
                              std::to_string(variances_[i]));
    }
  }
}

void ControlBounds::clamp_rows(ControlSequence& seq) const {
  for (Eigen::Index i = 0; i < seq.rows(); ++i) {
    for (Eigen::Index j = 0; j < seq.cols(); ++j) seq(i, j) = std::clamp(seq(i, j), lo[j], hi[j]);
  }
}

void ControlBounds::validate() const {
  if (lo.size() != hi.size() || lo.size() == 0) throw ConfigError("control bounds: lo/hi size mismatch");
  for (int i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i])) throw ConfigError("control bounds: lo > hi on channel " + std::to_string(i));
  }
}

double wrap_angle(double a) {
  if (!std::isfinite(a)) throw std::domain_error("wrap_angle: non-finite input");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);  // (-2pi, 2pi)
  if (r > std::numbers::pi) {
    r -= two_pi;
  } else if (r <= -std::numbers::pi) {
    r += two_pi;
  }
  return r;
}

}  // namespace tmppi
