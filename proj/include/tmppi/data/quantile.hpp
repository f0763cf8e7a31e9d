#pragma once

#include <vector>

#include "tmppi/data/window_sample.hpp"

namespace tmppi::data {

/// Per-channel map through the empirical CDF onto [0, 1].
///
/// Each channel keeps n_q reference quantiles at evenly spaced probabilities,
/// interpolated linearly between order statistics. The forward map is the
/// piecewise-linear CDF through those points, averaged over the left- and
/// right-most matches so runs of equal quantiles map to their midpoint, and
/// clipped to [0, 1]. A constant channel maps everything to 0.5 and inverts to
/// the constant.
class QuantileTransform {
 public:
  QuantileTransform() = default;
  /// Rows of `data` are samples, columns are channels. n_q is capped at the
  /// number of samples. Throws std::invalid_argument on empty or non-finite data.
  static QuantileTransform fit(const RowMatrix& data, int n_q = 1000);
  /// Rebuilds a fitted transform; rows of `quantiles` are per-channel tables.
  static QuantileTransform from_quantiles(const RowMatrix& quantiles);

  int channels() const { return static_cast<int>(quantiles_.rows()); }
  int num_quantiles() const { return static_cast<int>(quantiles_.cols()); }
  const RowMatrix& quantiles() const { return quantiles_; }
  bool is_constant(int channel) const;

  double apply(int channel, double x) const;
  double invert(int channel, double u) const;
  /// Transforms every row of `data` (columns = channels).
  RowMatrix apply(const RowMatrix& data) const;
  RowMatrix invert(const RowMatrix& data) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXd invert(const Eigen::VectorXd& v) const;

 private:
  double reference(int i) const;
  RowMatrix quantiles_;  // channels x n_q
};

/// Separate transforms for states, controls and context.
struct Normalizer {
  QuantileTransform states;
  QuantileTransform controls;
  QuantileTransform context;

  /// Fits on every row of every sample's past states, future controls and context.
  static Normalizer fit(const std::vector<WindowSample>& samples, int n_q = 1000);
  WindowSample apply(const WindowSample& s) const;
  std::vector<WindowSample> apply(const std::vector<WindowSample>& samples) const;
};

}  // namespace tmppi::data
