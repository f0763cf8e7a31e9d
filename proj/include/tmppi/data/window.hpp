#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tmppi/data/episode.hpp"

namespace tmppi::data {

/// One sample per t with t + H - 1 < T: past states x_{t-k+1..t}, left-padded
/// with x_0, and controls u_{t..t+H-1}. Episodes shorter than H yield nothing.
std::vector<WindowSample> window(const EpisodeLog& episode, int k, int horizon, int episode_index = 0);

/// Windows of a single step: the k most recent states up to row t, left-padded.
RowMatrix past_states(const RowMatrix& states, int t, int k);

/// Shuffles episode indices with `seed` and assigns the first
/// round(ratio * count) (at least one, at most count - 1) to training.
/// Throws std::invalid_argument for fewer than 2 episodes or ratio outside (0, 1).
std::pair<std::vector<int>, std::vector<int>> split_episodes(int count, double ratio, std::uint64_t seed);

/// Windows every episode and splits them at episode granularity.
std::pair<std::vector<WindowSample>, std::vector<WindowSample>> split(const std::vector<EpisodeLog>& episodes, int k,
                                                                      int horizon, double ratio,
                                                                      std::uint64_t seed);

}  // namespace tmppi::data
