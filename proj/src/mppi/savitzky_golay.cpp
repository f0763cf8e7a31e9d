#include "tmppi/mppi/savitzky_golay.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <string>

namespace tmppi::mppi {

namespace {

void validate(int length, int window, int order) {
  if (window < 1 || window % 2 == 0) throw ConfigError("savitzky_golay: window must be odd and positive");
  if (order < 0 || order >= window) throw ConfigError("savitzky_golay: order must satisfy 0 <= order < window");
  if (length < 1) throw ConfigError("savitzky_golay: empty sequence");
  if (window > 2 * length - 1) {
    throw ConfigError("savitzky_golay: window " + std::to_string(window) + " too wide for length " +
                      std::to_string(length));
  }
}

}  // namespace

Eigen::VectorXd savitzky_golay_weights(int length, int position, int window, int order) {
  validate(length, window, order);
  const int half = window / 2;
  const int lo = std::max(0, position - half);
  const int hi = std::min(length - 1, position + half);
  const int count = hi - lo + 1;
  const int degree = std::min(order, count - 1);

  Eigen::MatrixXd vander(count, degree + 1);
  for (int r = 0; r < count; ++r) {
    const double offset = static_cast<double>(lo + r - position);
    double power = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vander(r, c) = power;
      power *= offset;
    }
  }
  // Value of the fitted polynomial at offset 0 is its constant coefficient,
  // i.e. the first row of the pseudo-inverse.
  const Eigen::MatrixXd pinv = vander.completeOrthogonalDecomposition().pseudoInverse();
  return pinv.row(0).transpose();
}

Eigen::VectorXd savitzky_golay(const Eigen::VectorXd& seq, int window, int order) {
  const int n = static_cast<int>(seq.size());
  validate(n, window, order);
  const int half = window / 2;
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = savitzky_golay_weights(n, i, window, order);
    const int lo = std::max(0, i - half);
    out[i] = w.dot(seq.segment(lo, w.size()));
  }
  return out;
}

ControlSequence savitzky_golay(const ControlSequence& seq, int window, int order) {
  const int n = static_cast<int>(seq.rows());
  validate(n, window, order);
  const int half = window / 2;
  ControlSequence out(seq.rows(), seq.cols());
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = savitzky_golay_weights(n, i, window, order);
    const int lo = std::max(0, i - half);
    for (Eigen::Index c = 0; c < seq.cols(); ++c) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < w.size(); ++j) acc += w[j] * seq(lo + j, c);
      out(i, c) = acc;
    }
  }
  return out;
}

}  // namespace tmppi::mppi
