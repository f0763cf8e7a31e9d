#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tmppi/data/window_sample.hpp"
#include "tmppi/env/environment.hpp"
#include "tmppi/mppi/engine.hpp"

namespace tmppi::data {

/// One closed-loop episode. Row t of `states` is the state at which row t of
/// `controls` was applied; costs[t] is the running cost of that pair.
struct EpisodeLog {
  int env_id = 0;
  std::uint64_t seed = 0;
  env::Outcome outcome = env::Outcome::Running;
  Eigen::VectorXd context;               // at t = 0
  std::vector<env::Obstacle> obstacles;  // at t = 0
  RowMatrix states;                      // T x n
  RowMatrix controls;                    // T x m
  Eigen::VectorXd costs;                 // T
  Eigen::VectorXd final_state;           // n, the state after the last control

  int steps() const { return static_cast<int>(controls.rows()); }
  double total_cost() const { return costs.sum(); }
};

/// What a mean initializer sees at step t.
struct StepView {
  int t = 0;
  const RowMatrix* states = nullptr;  // rows 0..t are x_0..x_t
  Context context;                    // env.context(x_t)
  const ControlSequence* shifted = nullptr;  // previous solution shifted
};

/// Returns the mean sequence handed to the MPPI solve at this step.
using MeanInitializer = std::function<ControlSequence(const StepView&)>;

/// Warm start from the previous solution (baseline MPPI).
MeanInitializer shifted_mean_initializer();

struct EpisodeOptions {
  /// Wall-clock time of each step (initializer + solve) is recorded when set.
  bool measure_time = false;
};

struct EpisodeResult {
  EpisodeLog log;
  std::vector<double> step_ms;  // empty unless timing was requested
  int infeasible_steps = 0;     // steps where every sample was infeasible
};

/// Runs MPPI in closed loop on `env` until it leaves the Running status.
///
/// The solve at step t draws from SeededRng(seed, stream).fork(t). When every
/// sample is infeasible the first row of the initial mean is applied.
EpisodeResult run_episode(env::Environment& env, const mppi::MppiConfig& cfg, const MeanInitializer& init,
                          std::uint64_t seed, const EpisodeOptions& options = {});

}  // namespace tmppi::data
