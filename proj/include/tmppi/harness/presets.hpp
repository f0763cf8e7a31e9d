#pragma once

#include <cstdint>
#include <filesystem>

#include "tmppi/core/kv_config.hpp"
#include "tmppi/data/collect.hpp"
#include "tmppi/harness/experiment.hpp"
#include "tmppi/nn/trainer.hpp"

namespace tmppi::harness {

/// Environment defaults. Racing uses the reduced track unless `full` is set.
env::EnvironmentSpec default_env(env::EnvKind kind, bool full_racing = false);

/// Tuned MPPI defaults for the environment (horizon 20 navigation, 25 racing).
mppi::MppiConfig default_mppi(env::EnvKind kind, bool full_racing = false);

/// Everything `train` needs besides the dataset.
struct TrainingPlan {
  nn::TransformerConfig model;
  nn::TrainConfig train;
  double train_ratio = 0.9;
  int n_quantiles = 1000;
  /// Caps the number of training windows (evenly strided); 0 keeps all.
  int max_train_windows = 0;
  int max_val_windows = 0;
};

/// Architecture and optimizer settings of the full-scale configuration.
TrainingPlan default_training(const env::EnvironmentSpec& env, int horizon);
/// Smaller model and epoch budget that fit a single desktop CPU core.
TrainingPlan desk_training(const env::EnvironmentSpec& env, int horizon);

/// Environment spec from `environment`, `racing.preset` (reduced | full) and
/// the nav.* / racing.* keys.
env::EnvironmentSpec env_from_config(const KvConfig& cfg);

/// mppi.samples, mppi.horizon, mppi.lambda, mppi.noise_std = [..],
/// mppi.sg_window, mppi.sg_order, mppi.correction (verbatim | symmetric | none).
mppi::MppiConfig mppi_from_config(const KvConfig& cfg, const env::EnvironmentSpec& env);

/// sweep.controllers, sweep.samples, sweep.episodes, sweep.dynamic,
/// sweep.timing, model.path, plus the environment and MPPI keys.
ExperimentConfig experiment_from_config(const KvConfig& cfg);

/// collect.episodes, collect.samples, collect.include_failures, train.k_past, plus the
/// environment and MPPI keys.
data::CollectConfig collect_from_config(const KvConfig& cfg);

/// train.preset (desk | full), then train.d_model, train.layers, train.heads,
/// train.d_ff, train.dropout, train.k_past, train.batch_size,
/// train.max_epochs, train.patience, train.lr, train.huber_delta,
/// train.train_ratio, train.quantiles, train.max_windows, train.max_val_windows.
TrainingPlan training_from_config(const KvConfig& cfg, const env::EnvironmentSpec& env, int horizon);

struct TrainOutcome {
  TransformerPolicy policy;
  nn::TrainResult result;
  std::size_t train_windows = 0;
  std::size_t val_windows = 0;
};

/// Windows, splits, normalizes and trains on a dataset.
TrainOutcome train_policy(const data::Dataset& dataset, const TrainingPlan& plan, std::uint64_t seed,
                          const nn::EpochCallback& on_epoch = {});

}  // namespace tmppi::harness
