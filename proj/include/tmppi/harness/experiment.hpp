#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tmppi/env/world_config.hpp"
#include "tmppi/harness/policy.hpp"
#include "tmppi/mppi/engine.hpp"

namespace tmppi::harness {

enum class Controller { Mppi, TransformerMppi };
std::string to_string(Controller c);
/// Accepts "mppi" and "transformer-mppi".
Controller controller_from_string(const std::string& s);

struct ExperimentConfig {
  env::EnvironmentSpec env;
  mppi::MppiConfig mppi;
  std::vector<Controller> controllers{Controller::Mppi};
  std::vector<int> sample_counts{50, 100, 200, 300, 400, 500};
  int episodes = 10;
  /// One sweep per entry; navigation only.
  std::vector<int> dynamic_counts{0};
  std::uint64_t seed = 0;
  std::filesystem::path model_path;
  /// Episodes run concurrently; outputs do not depend on this value.
  int threads = 1;
  /// Record per-step wall time (makes mean_step_ms nondeterministic).
  bool timing = false;

  void validate() const;
};

struct EpisodeMetrics {
  Controller controller = Controller::Mppi;
  int samples = 0;
  int episode = 0;
  std::uint64_t seed = 0;
  double cost = 0.0;  // sum of realized running costs
  int steps = 0;
  env::Outcome outcome = env::Outcome::Running;
  double mean_step_ms = 0.0;  // NaN unless timed
};

/// Closed-loop episode on the world built from `seed`, with MPPI noise drawn
/// from the same seed. `policy` is required for the transformer controller.
/// The full trajectory is copied to `log_out` when given.
EpisodeMetrics run_episode(const env::EnvironmentSpec& env_spec, const mppi::MppiConfig& mppi_cfg,
                           Controller controller, const TransformerPolicy* policy, std::uint64_t seed,
                           bool timing = false, data::EpisodeLog* log_out = nullptr);

}  // namespace tmppi::harness
