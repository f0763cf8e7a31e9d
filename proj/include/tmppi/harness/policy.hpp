#pragma once

#include <filesystem>

#include "tmppi/data/episode.hpp"
#include "tmppi/data/quantile.hpp"
#include "tmppi/nn/model_io.hpp"
#include "tmppi/nn/transformer.hpp"

namespace tmppi::harness {

/// A trained transformer together with the normalization it was trained in.
struct TransformerPolicy {
  nn::Transformer model;
  data::Normalizer normalizer;

  /// Predicted mean sequence in physical units for the given history,
  /// clamped to `bounds`.
  ControlSequence predict(const data::RowMatrix& states, int t, const Context& context,
                          const ControlBounds& bounds) const;
  /// Initializer for run_episode that ignores the shifted previous solution.
  data::MeanInitializer initializer(const ControlBounds& bounds) const;

  /// Throws ConfigError when the model and environment/MPPI dims disagree.
  void check_compatible(int state_dim, int control_dim, int context_dim, int horizon) const;
};

/// Stores the normalization tables as extra tensors "norm.states",
/// "norm.controls" and "norm.context".
void save_policy(const std::filesystem::path& path, const TransformerPolicy& policy);
TransformerPolicy load_policy(const std::filesystem::path& path);

}  // namespace tmppi::harness
