#pragma once

#include <cstdint>
#include <functional>

#include "tmppi/data/dataset.hpp"
#include "tmppi/env/world_config.hpp"

namespace tmppi::data {

struct CollectConfig {
  env::EnvironmentSpec env;
  mppi::MppiConfig mppi;
  int episodes = 1000;  // worlds to run (N_env)
  std::uint64_t seed = 0;
  int k_past = 5;
  /// Keep episodes that did not reach the goal.
  bool include_failures = false;
  /// Further seeds tried per world when generation fails.
  int max_retries = 100;
  /// Episodes run concurrently; the dataset does not depend on this.
  int workers = 1;
};

/// Seed of world `index` on retry `attempt`.
std::uint64_t collection_seed(std::uint64_t base, int index, int attempt);

/// Runs baseline MPPI on `episodes` randomized static worlds and keeps the
/// ones that reached the goal (or all, if include_failures). Dynamic
/// obstacles are disabled during collection.
Dataset collect(const CollectConfig& cfg, const std::function<void(int, const EpisodeLog&)>& on_episode = {});

}  // namespace tmppi::data
