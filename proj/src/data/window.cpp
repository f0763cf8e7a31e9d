#include "tmppi/data/window.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tmppi/core/rng.hpp"

namespace tmppi::data {

RowMatrix past_states(const RowMatrix& states, int t, int k) {
  if (k < 1 || t < 0 || t >= states.rows()) throw std::invalid_argument("past_states: index out of range");
  RowMatrix out(k, states.cols());
  for (int i = 0; i < k; ++i) out.row(i) = states.row(std::max(0, t - k + 1 + i));
  return out;
}

std::vector<WindowSample> window(const EpisodeLog& episode, int k, int horizon, int episode_index) {
  if (k < 1 || horizon < 1) throw std::invalid_argument("window: k and horizon must be >= 1");
  std::vector<WindowSample> out;
  const int steps = episode.steps();
  for (int t = 0; t + horizon <= steps; ++t) {
    WindowSample s;
    s.past_states = past_states(episode.states, t, k);
    s.context = episode.context;
    s.future_controls = episode.controls.middleRows(t, horizon);
    s.episode = episode_index;
    s.t = t;
    out.push_back(std::move(s));
  }
  return out;
}

std::pair<std::vector<int>, std::vector<int>> split_episodes(int count, double ratio, std::uint64_t seed) {
  if (count < 2) throw std::invalid_argument("split: need at least 2 episodes");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split: ratio must lie in (0, 1)");
  std::vector<int> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), 0);
  SeededRng rng(seed, 0x73706c74);  // "splt"
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  const int n_train = std::clamp(static_cast<int>(std::lround(ratio * count)), 1, count - 1);
  return {std::vector<int>(order.begin(), order.begin() + n_train), std::vector<int>(order.begin() + n_train, order.end())};
}

std::pair<std::vector<WindowSample>, std::vector<WindowSample>> split(const std::vector<EpisodeLog>& episodes, int k,
                                                                      int horizon, double ratio,
                                                                      std::uint64_t seed) {
  auto [train_ids, val_ids] = split_episodes(static_cast<int>(episodes.size()), ratio, seed);
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(val_ids.begin(), val_ids.end());
  std::pair<std::vector<WindowSample>, std::vector<WindowSample>> out;
  for (int id : train_ids) {
    auto w = window(episodes[static_cast<std::size_t>(id)], k, horizon, id);
    out.first.insert(out.first.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  for (int id : val_ids) {
    auto w = window(episodes[static_cast<std::size_t>(id)], k, horizon, id);
    out.second.insert(out.second.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  return out;
}

}  // namespace tmppi::data
