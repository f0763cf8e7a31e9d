#include "tmppi/data/episode.hpp"

#include <chrono>

namespace tmppi::data {

MeanInitializer shifted_mean_initializer() {
  return [](const StepView& view) { return *view.shifted; };
}

EpisodeResult run_episode(env::Environment& env, const mppi::MppiConfig& cfg, const MeanInitializer& init,
                          std::uint64_t seed, const EpisodeOptions& options) {
  cfg.validate();
  if (cfg.bounds.dim() != env.control_dim()) throw ConfigError("episode: MPPI control dim does not match environment");

  const int n = env.state_dim();
  const int m = env.control_dim();
  const int max_steps = env.max_steps();
  const SeededRng root(seed, 0x6d707069);  // "mppi"

  EpisodeResult result;
  EpisodeLog& log = result.log;
  log.seed = seed;
  State x = env.initial_state();
  log.context = env.context(x);
  log.obstacles = env.obstacles();
  log.states.resize(max_steps + 1, n);
  log.controls.resize(max_steps, m);
  log.costs.resize(max_steps);

  ControlSequence shifted = ControlSequence::Zero(cfg.horizon, m);
  cfg.bounds.clamp_rows(shifted);

  int t = 0;
  env::Outcome status = env.status(x, t);
  while (status == env::Outcome::Running) {
    log.states.row(t) = x.transpose();
    const auto start = std::chrono::steady_clock::now();
    StepView view{t, &log.states, env.context(x), &shifted};
    ControlSequence mean = init(view);
    if (mean.rows() != cfg.horizon || mean.cols() != m) throw ConfigError("episode: initializer returned wrong shape");
    ControlInput u;
    try {
      const auto sol = mppi::mppi_step(env, x, mean, cfg, root.fork(static_cast<std::uint64_t>(t)));
      u = sol.applied_control;
      shifted = sol.mean_next;
    } catch (const mppi::AllInfeasible&) {
      cfg.bounds.clamp_rows(mean);
      u = mean.row(0).transpose();
      shifted = mppi::shift_mean(mean);
      ++result.infeasible_steps;
    }
    if (options.measure_time) {
      const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - start;
      result.step_ms.push_back(dt.count());
    }
    log.controls.row(t) = u.transpose();
    log.costs[t] = env.running_cost(x, u);
    x = env.step(x, u);
    env.on_step(x);
    ++t;
    status = env.status(x, t);
    if (t >= max_steps && status == env::Outcome::Running) status = env::Outcome::StepLimit;
  }
  log.states.conservativeResize(t, Eigen::NoChange);
  log.controls.conservativeResize(t, Eigen::NoChange);
  log.costs.conservativeResize(t);
  log.final_state = x;
  log.outcome = status;
  return result;
}

}  // namespace tmppi::data
