#include "tmppi/harness/experiment.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace tmppi::harness {

std::string to_string(Controller c) { return c == Controller::Mppi ? "mppi" : "transformer-mppi"; }

Controller controller_from_string(const std::string& s) {
  if (s == "mppi") return Controller::Mppi;
  if (s == "transformer-mppi") return Controller::TransformerMppi;
  throw ConfigError("unknown controller '" + s + "' (expected mppi or transformer-mppi)");
}

void ExperimentConfig::validate() const {
  if (episodes < 1) throw ConfigError("experiment: episodes must be >= 1");
  if (controllers.empty()) throw ConfigError("experiment: no controllers given");
  if (sample_counts.empty()) throw ConfigError("experiment: no sample counts given");
  for (int k : sample_counts) {
    if (k < 1) throw ConfigError("experiment: sample counts must be positive");
  }
  if (dynamic_counts.empty()) throw ConfigError("experiment: no dynamic obstacle counts given");
  for (int d : dynamic_counts) {
    if (d < 0 || d > env.nav.num_obstacles) throw ConfigError("experiment: dynamic count outside [0, obstacles]");
    if (d > 0 && env.kind != env::EnvKind::Navigation) {
      throw ConfigError("experiment: dynamic obstacles are only supported in navigation");
    }
  }
  mppi.validate();
}

EpisodeMetrics run_episode(const env::EnvironmentSpec& env_spec, const mppi::MppiConfig& mppi_cfg,
                           Controller controller, const TransformerPolicy* policy, std::uint64_t seed, bool timing,
                           data::EpisodeLog* log_out) {
  data::MeanInitializer init = data::shifted_mean_initializer();
  if (controller == Controller::TransformerMppi) {
    if (policy == nullptr) throw ConfigError("transformer-mppi requires a trained model");
    policy->check_compatible(env_spec.state_dim(), env_spec.control_dim(), env_spec.context_dim(), mppi_cfg.horizon);
    init = policy->initializer(mppi_cfg.bounds);
  }
  auto world = env::make_environment(env_spec, seed);
  const auto result = data::run_episode(*world, mppi_cfg, init, seed, {timing});

  EpisodeMetrics m;
  m.controller = controller;
  m.samples = mppi_cfg.num_samples;
  m.seed = seed;
  m.cost = result.log.total_cost();
  m.steps = result.log.steps();
  m.outcome = result.log.outcome;
  m.mean_step_ms = std::numeric_limits<double>::quiet_NaN();
  if (timing && !result.step_ms.empty()) {
    m.mean_step_ms = std::accumulate(result.step_ms.begin(), result.step_ms.end(), 0.0) /
                     static_cast<double>(result.step_ms.size());
  }
  if (log_out != nullptr) *log_out = result.log;
  return m;
}

}  // namespace tmppi::harness
