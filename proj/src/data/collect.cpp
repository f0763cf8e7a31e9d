#include "tmppi/data/collect.hpp"

#include <optional>

#include "tmppi/core/parallel.hpp"
#include "tmppi/core/rng.hpp"

namespace tmppi::data {

std::uint64_t collection_seed(std::uint64_t base, int index, int attempt) {
  return hash_combine(hash_combine(base, static_cast<std::uint64_t>(index)), static_cast<std::uint64_t>(attempt));
}

Dataset collect(const CollectConfig& cfg, const std::function<void(int, const EpisodeLog&)>& on_episode) {
  if (cfg.episodes < 0) throw ConfigError("collect: episodes must be >= 0");
  env::EnvironmentSpec spec = cfg.env;
  spec.nav.num_dynamic = 0;
  mppi::MppiConfig mcfg = cfg.mppi;
  mcfg.workers = 1;
  mcfg.validate();

  struct Slot {
    std::optional<EpisodeLog> log;
    int failures = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.episodes));
  parallel_for(slots.size(), cfg.workers, [&](std::size_t i) {
    Slot& slot = slots[i];
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      const std::uint64_t seed = collection_seed(cfg.seed, static_cast<int>(i), attempt);
      std::unique_ptr<env::Environment> world;
      try {
        world = env::make_environment(spec, seed);
      } catch (const env::WorldGenerationError&) {
        ++slot.failures;
        continue;
      }
      auto result = run_episode(*world, mcfg, shifted_mean_initializer(), seed);
      result.log.env_id = static_cast<int>(i);
      slot.log = std::move(result.log);
      return;
    }
  });

  Dataset d;
  d.state_dim = spec.state_dim();
  d.control_dim = spec.control_dim();
  d.context_dim = spec.context_dim();
  d.k_past = cfg.k_past;
  d.horizon = mcfg.horizon;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    Slot& slot = slots[i];
    d.stats.generation_failures += slot.failures;
    if (!slot.log) continue;
    ++d.stats.attempted;
    const bool success = slot.log->outcome == env::Outcome::GoalReached;
    if (success) ++d.stats.goal_reached;
    if (on_episode) on_episode(static_cast<int>(i), *slot.log);
    if (success || cfg.include_failures) {
      d.episodes.push_back(std::move(*slot.log));
    } else {
      ++d.stats.excluded;
    }
  }
  return d;
}

}  // namespace tmppi::data
