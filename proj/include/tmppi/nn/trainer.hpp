#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tmppi/data/window_sample.hpp"
#include "tmppi/nn/adam.hpp"
#include "tmppi/nn/transformer.hpp"

namespace tmppi::nn {

/// Stops after `patience` consecutive epochs without a strict improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience);

  /// Records the validation loss of the next epoch (1-based); returns true
  /// when training should stop.
  bool update(double val_loss);

  int best_epoch() const { return best_epoch_; }
  double best_loss() const { return best_loss_; }
  int epochs_seen() const { return epoch_; }
  bool improved_last() const { return improved_; }

 private:
  int patience_;
  int epoch_ = 0;
  int best_epoch_ = 0;
  double best_loss_;
  bool improved_ = false;
};

struct TrainConfig {
  int batch_size = 256;
  int max_epochs = 2000;
  int patience = 50;
  double huber_delta = 1.0;
  AdamConfig adam;
  std::uint64_t seed = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ParameterSet best_params;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

/// Called after every epoch; returning false ends training early.
using EpochCallback = std::function<bool(const EpochLog&)>;

/// Mean Huber loss of teacher-forced predictions over `samples` (dropout off).
double evaluate_loss(const Transformer& model, const std::vector<data::WindowSample>& samples, double huber_delta,
                     int batch_size = 256);

/// Teacher-forced mini-batch training with Adam and early stopping on the
/// validation loss. The model is left holding the best-validation parameters.
/// Throws std::invalid_argument on an empty training or validation set.
TrainResult train(Transformer& model, const std::vector<data::WindowSample>& train_set,
                  const std::vector<data::WindowSample>& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

/// Loss of one mini-batch recorded on `tape`; indices select from samples.
Tape::Var batch_loss(const Transformer& model, Tape& tape, const std::vector<data::WindowSample>& samples,
                     const std::vector<std::size_t>& indices, double huber_delta, SeededRng* dropout_rng);

}  // namespace tmppi::nn
