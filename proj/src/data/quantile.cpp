#include "tmppi/data/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmppi::data {

QuantileTransform QuantileTransform::fit(const RowMatrix& data, int n_q) {
  if (data.rows() < 1 || data.cols() < 1) throw std::invalid_argument("quantile fit: empty data");
  if (n_q < 2) throw std::invalid_argument("quantile fit: n_q must be >= 2");
  if (!data.allFinite()) throw std::invalid_argument("quantile fit: non-finite data");
  const auto n = data.rows();
  const int q = static_cast<int>(std::min<Eigen::Index>(n_q, std::max<Eigen::Index>(n, 2)));
  QuantileTransform t;
  t.quantiles_.resize(data.cols(), q);
  std::vector<double> col(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    for (Eigen::Index r = 0; r < n; ++r) col[static_cast<std::size_t>(r)] = data(r, c);
    std::sort(col.begin(), col.end());
    for (int i = 0; i < q; ++i) {
      const double pos = t.reference(i) * static_cast<double>(n - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, col.size() - 1);
      const double frac = pos - static_cast<double>(lo);
      t.quantiles_(c, i) = col[lo] + frac * (col[hi] - col[lo]);
    }
    // Rounding in the interpolation must not break monotonicity.
    for (int i = 1; i < q; ++i) t.quantiles_(c, i) = std::max(t.quantiles_(c, i), t.quantiles_(c, i - 1));
  }
  return t;
}

QuantileTransform QuantileTransform::from_quantiles(const RowMatrix& quantiles) {
  if (quantiles.rows() < 1 || quantiles.cols() < 2) throw std::invalid_argument("quantile table too small");
  if (!quantiles.allFinite()) throw std::invalid_argument("quantile table not finite");
  for (Eigen::Index c = 0; c < quantiles.rows(); ++c) {
    for (Eigen::Index i = 1; i < quantiles.cols(); ++i) {
      if (quantiles(c, i) < quantiles(c, i - 1)) throw std::invalid_argument("quantile table not sorted");
    }
  }
  QuantileTransform t;
  t.quantiles_ = quantiles;
  return t;
}

double QuantileTransform::reference(int i) const {
  return static_cast<double>(i) / static_cast<double>(quantiles_.cols() - 1);
}

bool QuantileTransform::is_constant(int channel) const {
  return quantiles_(channel, 0) == quantiles_(channel, quantiles_.cols() - 1);
}

double QuantileTransform::apply(int channel, double x) const {
  if (is_constant(channel)) return 0.5;
  const auto row = quantiles_.row(channel);
  const double* q = row.data();
  const int n = static_cast<int>(quantiles_.cols());
  auto lerp = [&](int i) { return reference(i) + (x - q[i]) / (q[i + 1] - q[i]) * (reference(i + 1) - reference(i)); };

  double left;
  const int i = static_cast<int>(std::lower_bound(q, q + n, x) - q);
  if (i == n) {
    left = 1.0;
  } else if (q[i] == x) {
    left = reference(i);
  } else if (i == 0) {
    left = 0.0;
  } else {
    left = lerp(i - 1);
  }

  double right;
  const int j = static_cast<int>(std::upper_bound(q, q + n, x) - q);
  if (j == 0) {
    right = 0.0;
  } else if (q[j - 1] == x) {
    right = reference(j - 1);
  } else if (j == n) {
    right = 1.0;
  } else {
    right = lerp(j - 1);
  }
  return std::clamp(0.5 * (left + right), 0.0, 1.0);
}

double QuantileTransform::invert(int channel, double u) const {
  const int n = static_cast<int>(quantiles_.cols());
  const double pos = std::clamp(u, 0.0, 1.0) * (n - 1);
  const int i = std::min(static_cast<int>(std::floor(pos)), n - 2);
  const double frac = pos - i;
  return quantiles_(channel, i) + frac * (quantiles_(channel, i + 1) - quantiles_(channel, i));
}

RowMatrix QuantileTransform::apply(const RowMatrix& data) const {
  if (data.cols() != channels()) throw std::invalid_argument("quantile apply: channel count mismatch");
  RowMatrix out(data.rows(), data.cols());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out(r, c) = apply(static_cast<int>(c), data(r, c));
  }
  return out;
}

RowMatrix QuantileTransform::invert(const RowMatrix& data) const {
  if (data.cols() != channels()) throw std::invalid_argument("quantile invert: channel count mismatch");
  RowMatrix out(data.rows(), data.cols());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out(r, c) = invert(static_cast<int>(c), data(r, c));
  }
  return out;
}

Eigen::VectorXd QuantileTransform::apply(const Eigen::VectorXd& v) const {
  if (v.size() != channels()) throw std::invalid_argument("quantile apply: channel count mismatch");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) out[c] = apply(static_cast<int>(c), v[c]);
  return out;
}

Eigen::VectorXd QuantileTransform::invert(const Eigen::VectorXd& v) const {
  if (v.size() != channels()) throw std::invalid_argument("quantile invert: channel count mismatch");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index c = 0; c < v.size(); ++c) out[c] = invert(static_cast<int>(c), v[c]);
  return out;
}

Normalizer Normalizer::fit(const std::vector<WindowSample>& samples, int n_q) {
  if (samples.empty()) throw std::invalid_argument("normalizer fit: no samples");
  const auto& first = samples.front();
  const auto k = first.past_states.rows();
  const auto h = first.future_controls.rows();
  const auto count = static_cast<Eigen::Index>(samples.size());
  RowMatrix states(count * k, first.past_states.cols());
  RowMatrix controls(count * h, first.future_controls.cols());
  RowMatrix context(count, first.context.size());
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    states.middleRows(i * k, k) = s.past_states;
    controls.middleRows(i * h, h) = s.future_controls;
    context.row(i) = s.context.transpose();
  }
  return {QuantileTransform::fit(states, n_q), QuantileTransform::fit(controls, n_q),
          QuantileTransform::fit(context, n_q)};
}

WindowSample Normalizer::apply(const WindowSample& s) const {
  WindowSample out = s;
  out.past_states = states.apply(s.past_states);
  out.future_controls = controls.apply(s.future_controls);
  out.context = context.apply(s.context);
  return out;
}

std::vector<WindowSample> Normalizer::apply(const std::vector<WindowSample>& samples) const {
  std::vector<WindowSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(apply(s));
  return out;
}

}  // namespace tmppi::data
