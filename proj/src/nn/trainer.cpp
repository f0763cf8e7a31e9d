#include "tmppi/nn/trainer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tmppi/core/types.hpp"

namespace tmppi::nn {

EarlyStopping::EarlyStopping(int patience)
    : patience_(patience), best_loss_(std::numeric_limits<double>::infinity()) {
  if (patience < 1) throw ConfigError("early stopping: patience must be >= 1");
}

bool EarlyStopping::update(double val_loss) {
  ++epoch_;
  improved_ = val_loss < best_loss_;
  if (improved_) {
    best_loss_ = val_loss;
    best_epoch_ = epoch_;
  }
  return epoch_ - best_epoch_ >= patience_;
}

Tape::Var batch_loss(const Transformer& model, Tape& tape, const std::vector<data::WindowSample>& samples,
                     const std::vector<std::size_t>& indices, double huber_delta, SeededRng* dropout_rng) {
  const auto& cfg = model.config();
  const int batch = static_cast<int>(indices.size());
  const int k = cfg.k_past;
  const int h = cfg.horizon;
  Matrix states(static_cast<Eigen::Index>(batch) * k, cfg.state_dim);
  Matrix contexts(batch, cfg.context_dim);
  Matrix tokens(static_cast<Eigen::Index>(batch) * h, cfg.control_dim);
  Matrix targets(static_cast<Eigen::Index>(batch) * h, cfg.control_dim);
  for (int b = 0; b < batch; ++b) {
    const auto& s = samples[indices[b]];
    if (s.past_states.rows() != k || s.past_states.cols() != cfg.state_dim ||
        s.context.size() != cfg.context_dim || s.future_controls.rows() != h ||
        s.future_controls.cols() != cfg.control_dim) {
      throw std::invalid_argument("training sample shape does not match the model config");
    }
    states.middleRows(static_cast<Eigen::Index>(b) * k, k) = s.past_states;
    contexts.row(b) = s.context.transpose();
    targets.middleRows(static_cast<Eigen::Index>(b) * h, h) = s.future_controls;
    tokens.middleRows(static_cast<Eigen::Index>(b) * h, h) = Transformer::shifted_targets(s.future_controls);
  }
  const auto memory = model.encode(tape, states, contexts, batch, dropout_rng);
  const auto pred = model.decode(tape, tokens, memory, batch, dropout_rng);
  return tape.huber(pred, targets, huber_delta);
}

double evaluate_loss(const Transformer& model, const std::vector<data::WindowSample>& samples, double huber_delta,
                     int batch_size) {
  if (samples.empty()) throw std::invalid_argument("evaluate_loss: no samples");
  double total = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(samples.size(), start + static_cast<std::size_t>(batch_size));
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    Tape tape(false);
    const auto loss = batch_loss(model, tape, samples, idx, huber_delta, nullptr);
    total += tape.value(loss)(0, 0) * static_cast<double>(idx.size());
  }
  return total / static_cast<double>(samples.size());
}

TrainResult train(Transformer& model, const std::vector<data::WindowSample>& train_set,
                  const std::vector<data::WindowSample>& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (val_set.empty()) throw std::invalid_argument("train: empty validation set");
  if (cfg.batch_size < 1 || cfg.max_epochs < 1) throw ConfigError("train: batch_size and max_epochs must be >= 1");

  Adam adam(model.params(), cfg.adam);
  EarlyStopping stopper(cfg.patience);
  const SeededRng shuffle_root(cfg.seed, 0x73687566);  // "shuf"
  const SeededRng dropout_root(cfg.seed, 0x64726f70);  // "drop"

  TrainResult result;
  result.best_params = model.params();
  std::vector<std::size_t> order(train_set.size());
  std::vector<std::size_t> idx;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    SeededRng shuffle = shuffle_root.fork(static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.uniform_index(i)]);

    double train_total = 0.0;
    std::uint64_t batch_id = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      idx.assign(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
      SeededRng dropout = dropout_root.fork(static_cast<std::uint64_t>(epoch)).fork(batch_id++);
      Tape tape(true);
      const auto loss = batch_loss(model, tape, train_set, idx, cfg.huber_delta, &dropout);
      std::vector<Matrix> grads = model.params().zeros_like();
      tape.backward(loss, grads);
      adam.step(model.params(), grads);
      train_total += tape.value(loss)(0, 0) * static_cast<double>(idx.size());
    }

    EpochLog entry{epoch, train_total / static_cast<double>(train_set.size()),
                   evaluate_loss(model, val_set, cfg.huber_delta, cfg.batch_size)};
    result.log.push_back(entry);
    const bool stop = stopper.update(entry.val_loss);
    if (stopper.improved_last()) result.best_params = model.params();
    if (on_epoch && !on_epoch(entry)) break;
    if (stop) break;
  }
  result.best_epoch = stopper.best_epoch();
  result.best_val_loss = stopper.best_loss();
  model.params() = result.best_params;
  return result;
}

}  // namespace tmppi::nn
