#include "tmppi/mppi/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tmppi/core/parallel.hpp"
#include "tmppi/mppi/savitzky_golay.hpp"

namespace tmppi::mppi {

void MppiConfig::validate() const {
  if (num_samples < 1) throw ConfigError("mppi: num_samples must be >= 1");
  if (horizon < 1) throw ConfigError("mppi: horizon must be >= 1");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("mppi: temperature must be > 0");
  if (sg_window < 1 || sg_window % 2 == 0) throw ConfigError("mppi: sg_window must be odd and positive");
  if (sg_order < 0 || sg_order >= sg_window) throw ConfigError("mppi: sg_order must be < sg_window");
  if (sg_window > 2 * horizon - 1) throw ConfigError("mppi: sg_window wider than 2 * horizon - 1");
  bounds.validate();
  if (noise_cov.dim() != bounds.dim()) throw ConfigError("mppi: noise covariance and bounds disagree on control dim");
}

SampleBatch generate_samples(const ControlSequence& mean, const MppiConfig& cfg, const SeededRng& rng) {
  cfg.validate();
  if (mean.rows() != cfg.horizon || mean.cols() != cfg.bounds.dim()) {
    throw ConfigError("mppi: mean sequence shape does not match horizon x control_dim");
  }
  const auto k_count = static_cast<std::size_t>(cfg.num_samples);
  const ControlInput sd = cfg.noise_cov.std_devs();

  SampleBatch batch;
  batch.noise.resize(k_count);
  batch.perturbed.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    SeededRng stream = rng.fork(k);
    ControlSequence eps(mean.rows(), mean.cols());
    for (Eigen::Index i = 0; i < eps.rows(); ++i) {
      for (Eigen::Index j = 0; j < eps.cols(); ++j) eps(i, j) = sd[j] * stream.normal();
    }
    ControlSequence w = mean + eps;
    cfg.bounds.clamp_rows(w);
    batch.noise[k] = std::move(eps);
    batch.perturbed[k] = std::move(w);
  }
  return batch;
}

double rollout_cost(const env::Environment& env, const State& x0, const ControlSequence& controls) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  State x = x0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < controls.rows(); ++i) {
    const ControlInput u = controls.row(i).transpose();
    total += env.running_cost(x, u);
    x = env.step(x, u);
    if (!x.allFinite()) return inf;
  }
  total += env.terminal_cost(x);
  return std::isfinite(total) ? total : inf;
}

double importance_correction(const ControlSequence& mean, const ControlSequence& noise, const DiagonalCovariance& cov,
                             ImportanceCorrection kind) {
  if (kind == ImportanceCorrection::None) return 0.0;
  const double w_factor = kind == ImportanceCorrection::Verbatim ? 1.0 : 0.5;
  const ControlInput inv = cov.inverse();
  double q = 0.0;
  for (Eigen::Index i = 0; i < mean.rows(); ++i) {
    for (Eigen::Index j = 0; j < mean.cols(); ++j) {
      const double u = mean(i, j);
      const double w = u + noise(i, j);
      q += inv[j] * (0.5 * u * u - w_factor * w * w);
    }
  }
  return q;
}

std::vector<double> normalized_exponential(const std::vector<double>& exponents) {
  double max_e = -std::numeric_limits<double>::infinity();
  for (double e : exponents) max_e = std::max(max_e, e);
  if (!std::isfinite(max_e)) throw AllInfeasible("mppi: every sample is infeasible");
  std::vector<double> w(exponents.size(), 0.0);
  double sum = 0.0;
  for (std::size_t k = 0; k < exponents.size(); ++k) {
    w[k] = std::isfinite(exponents[k]) ? std::exp(exponents[k] - max_e) : 0.0;
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::vector<double> compute_weights(const std::vector<double>& costs, const ControlSequence& mean,
                                    const std::vector<ControlSequence>& noise, const MppiConfig& cfg) {
  if (costs.size() != noise.size()) throw std::invalid_argument("compute_weights: costs and noise sizes differ");
  std::vector<double> exponents(costs.size());
  for (std::size_t k = 0; k < costs.size(); ++k) {
    if (!std::isfinite(costs[k])) {
      exponents[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    exponents[k] = -costs[k] / cfg.temperature + importance_correction(mean, noise[k], cfg.noise_cov, cfg.correction);
  }
  return normalized_exponential(exponents);
}

ControlSequence update_mean(const ControlSequence& mean, const std::vector<ControlSequence>& noise,
                            const std::vector<double>& weights, const ControlBounds& bounds) {
  ControlSequence out = mean;
  for (std::size_t k = 0; k < noise.size(); ++k) {
    if (weights[k] == 0.0) continue;
    out += weights[k] * noise[k];
  }
  bounds.clamp_rows(out);
  return out;
}

ControlSequence shift_mean(const ControlSequence& mean) {
  const Eigen::Index h = mean.rows();
  ControlSequence out = mean;
  if (h <= 1) return out;
  out.topRows(h - 1) = mean.bottomRows(h - 1);
  out.row(h - 1) = mean.row(h - 1);
  return out;
}

MppiSolution mppi_step(const env::Environment& env, const State& x, const ControlSequence& mean_init,
                       const MppiConfig& cfg, const SeededRng& rng) {
  ControlSequence mean = mean_init;
  cfg.bounds.clamp_rows(mean);

  SampleBatch batch = generate_samples(mean, cfg, rng);
  batch.costs.assign(batch.perturbed.size(), 0.0);
  parallel_for(batch.perturbed.size(), cfg.workers,
               [&](std::size_t k) { batch.costs[k] = rollout_cost(env, x, batch.perturbed[k]); });

  batch.weights = compute_weights(batch.costs, mean, batch.noise, cfg);
  const ControlSequence updated = update_mean(mean, batch.noise, batch.weights, cfg.bounds);

  MppiSolution sol;
  sol.optimized = savitzky_golay(updated, cfg.sg_window, cfg.sg_order);
  cfg.bounds.clamp_rows(sol.optimized);
  sol.applied_control = sol.optimized.row(0).transpose();
  sol.mean_next = shift_mean(sol.optimized);

  auto& d = sol.diagnostics;
  d.min_cost = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  int finite = 0;
  for (double c : batch.costs) {
    if (!std::isfinite(c)) {
      ++d.infeasible;
      continue;
    }
    d.min_cost = std::min(d.min_cost, c);
    sum += c;
    ++finite;
  }
  d.mean_cost = finite > 0 ? sum / finite : std::numeric_limits<double>::infinity();
  double sq = 0.0;
  for (double w : batch.weights) sq += w * w;
  d.effective_sample_size = 1.0 / sq;
  return sol;
}

}  // namespace tmppi::mppi
