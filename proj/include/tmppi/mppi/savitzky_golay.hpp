#pragma once

#include <Eigen/Core>

#include "tmppi/core/types.hpp"

namespace tmppi::mppi {

/// Least-squares polynomial smoothing.
///
/// Every point is replaced by the value at that point of the degree-`order`
/// polynomial fit over the window centered on it. Near the ends the window is
/// truncated to the samples that exist (no padding) and the degree drops to
/// fit the remaining points when necessary.
///
/// Throws ConfigError if `window` is even, `order >= window`, or the window is
/// wider than 2 * size - 1.
Eigen::VectorXd savitzky_golay(const Eigen::VectorXd& seq, int window, int order);

/// Applies savitzky_golay to each column (control channel) independently.
ControlSequence savitzky_golay(const ControlSequence& seq, int window, int order);

/// Weights w such that smoothed[i] = sum_j w[j] * seq[lo + j], where lo is the
/// first index of the (possibly truncated) window around position i.
Eigen::VectorXd savitzky_golay_weights(int length, int position, int window, int order);

}  // namespace tmppi::mppi
