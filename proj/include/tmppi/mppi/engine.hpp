#pragma once

#include <stdexcept>
#include <vector>

#include "tmppi/core/rng.hpp"
#include "tmppi/core/types.hpp"
#include "tmppi/env/environment.hpp"

namespace tmppi::mppi {

class AllInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exponent correction added to -J/lambda for each sample.
enum class ImportanceCorrection {
  /// sum_i 1/2 u_i' S^-1 u_i - w_i' S^-1 w_i, exactly as derived.
  Verbatim,
  /// sum_i 1/2 u_i' S^-1 u_i - 1/2 w_i' S^-1 w_i.
  Symmetric,
  None,
};

struct MppiConfig {
  int num_samples = 256;
  int horizon = 20;
  double temperature = 1.0;
  DiagonalCovariance noise_cov;
  int sg_window = 5;
  int sg_order = 3;
  ControlBounds bounds;
  ImportanceCorrection correction = ImportanceCorrection::Verbatim;
  /// Threads used for rollouts. Results do not depend on this value.
  int workers = 1;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

struct SampleBatch {
  std::vector<ControlSequence> noise;      // K entries of H x m, unclamped
  std::vector<ControlSequence> perturbed;  // clamp(mean + noise)
  std::vector<double> costs;
  std::vector<double> weights;
};

struct MppiDiagnostics {
  double min_cost = 0.0;
  double mean_cost = 0.0;  // over finite samples
  double effective_sample_size = 0.0;
  int infeasible = 0;
};

struct MppiSolution {
  ControlInput applied_control;
  ControlSequence optimized;  // updated and smoothed, before the shift
  ControlSequence mean_next;  // optimized shifted by one step
  MppiDiagnostics diagnostics;
};

/// Draws noise[k] from rng.fork(k) so every sample is reproducible on its own.
SampleBatch generate_samples(const ControlSequence& mean, const MppiConfig& cfg, const SeededRng& rng);

/// phi(x_H) + sum_{i<H} s(x_i, u_i), starting from x_0 = x0. Returns +inf if the
/// dynamics leave the finite range.
double rollout_cost(const env::Environment& env, const State& x0, const ControlSequence& controls);

/// Importance-correction exponent q(W^k) for one sample.
double importance_correction(const ControlSequence& mean, const ControlSequence& noise, const DiagonalCovariance& cov,
                             ImportanceCorrection kind);

/// Normalized weights exp(e_k - max e) / sum, e_k = -J_k / lambda + q(W^k).
/// Samples with infinite cost get weight 0. Throws AllInfeasible if none is finite.
std::vector<double> compute_weights(const std::vector<double>& costs, const ControlSequence& mean,
                                    const std::vector<ControlSequence>& noise, const MppiConfig& cfg);

/// Softmax over exponents with the maximum subtracted; -inf entries map to 0.
std::vector<double> normalized_exponential(const std::vector<double>& exponents);

/// mean + sum_k w_k noise_k, accumulated in index order, then clamped.
ControlSequence update_mean(const ControlSequence& mean, const std::vector<ControlSequence>& noise,
                            const std::vector<double>& weights, const ControlBounds& bounds);

/// Receding-horizon warm start: drops the first row and repeats the last.
ControlSequence shift_mean(const ControlSequence& mean);

/// One full solve: sample, roll out, weight, update, smooth, shift.
MppiSolution mppi_step(const env::Environment& env, const State& x, const ControlSequence& mean_init,
                       const MppiConfig& cfg, const SeededRng& rng);

}  // namespace tmppi::mppi
