#pragma once

#include <cstdint>
#include <string>

#include "tmppi/nn/tape.hpp"

namespace tmppi::nn {

struct TransformerConfig {
  int d_model = 256;
  int num_layers = 3;  // encoder and decoder each
  int num_heads = 8;
  int d_ff = 1024;
  double dropout = 0.1;
  int k_past = 5;
  int horizon = 20;
  int state_dim = 3;
  int control_dim = 2;
  int context_dim = 32;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Encoder tokens of one sample: k past states plus the context vector.
struct EncoderInput {
  Matrix past_states;       // k_past x state_dim
  Eigen::VectorXd context;  // context_dim
};

/// Sinusoidal table: P[pos][2i] = sin(pos / 10000^(2i/d)), P[pos][2i+1] = cos(same).
/// Throws ConfigError for odd d_model or non-positive sizes.
Matrix positional_encoding(int length, int d_model);

/// softmax(Q K' / sqrt(d_k)) V with an optional causal mask (no gradients).
Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, bool causal);

/// Concat(head_1..head_h) W_o with head_i = attention(x_q Wq_i, x_kv Wk_i, x_kv Wv_i).
/// The per-head projections are the column blocks of wq, wk and wv.
Matrix multi_head_attention(const Matrix& x_q, const Matrix& x_kv, const Matrix& wq, const Matrix& wk,
                            const Matrix& wv, const Matrix& wo, int heads, bool causal);

/// ReLU(x W1 + b1) W2 + b2, row by row.
Matrix ffn(const Matrix& x, const Matrix& w1, const Matrix& b1, const Matrix& w2, const Matrix& b2);

/// Post-norm encoder-decoder transformer mapping (past states, context) to a
/// control sequence.
class Transformer {
 public:
  /// Fresh model: Glorot-uniform weights, zero biases, unit norm gains.
  Transformer(TransformerConfig cfg, std::uint64_t seed);
  /// Wraps existing parameters; throws ConfigError if names or shapes disagree with cfg.
  Transformer(TransformerConfig cfg, ParameterSet params);

  const TransformerConfig& config() const { return cfg_; }
  const ParameterSet& params() const { return params_; }
  ParameterSet& params() { return params_; }

  /// Batched encoder. `states` stacks batch * k_past rows, `contexts` one row
  /// per sample. Dropout is active iff dropout_rng is non-null.
  Tape::Var encode(Tape& tape, const Matrix& states, const Matrix& contexts, int batch, SeededRng* dropout_rng) const;
  /// Batched decoder over `tokens` (batch * len rows of control_dim); returns
  /// batch * len rows of predicted controls.
  Tape::Var decode(Tape& tape, const Matrix& tokens, Tape::Var memory, int batch, SeededRng* dropout_rng) const;

  /// (k_past + 1) x d_model encoder memory for one sample, dropout off.
  Matrix encoder_forward(const EncoderInput& input) const;
  /// Predictions (len x control_dim) for decoder tokens given encoder memory.
  Matrix decoder_forward(const Matrix& tokens, const Matrix& memory) const;
  /// Starts from a zero token and feeds each prediction back as the next
  /// token; returns horizon x control_dim predictions.
  Matrix predict_autoregressive(const EncoderInput& input, int horizon) const;

  /// Teacher-forcing decoder input: a zero row followed by targets[0..len-2].
  static Matrix shifted_targets(const Matrix& targets);

 private:
  Tape::Var p(Tape& tape, const std::string& name) const;
  Tape::Var linear(Tape& tape, Tape::Var x, const std::string& prefix) const;
  Tape::Var mha(Tape& tape, Tape::Var x_q, Tape::Var x_kv, const std::string& prefix, int batch, bool causal) const;
  Tape::Var feed_forward(Tape& tape, Tape::Var x, const std::string& prefix) const;
  Tape::Var add_norm(Tape& tape, Tape::Var residual, Tape::Var sublayer, const std::string& prefix,
                     SeededRng* dropout_rng) const;
  Matrix tiled_positions(int len, int batch) const;
  void check_shapes() const;

  TransformerConfig cfg_;
  ParameterSet params_;
};

/// Builds the parameter layout for cfg (values initialized from seed).
ParameterSet init_transformer_params(const TransformerConfig& cfg, std::uint64_t seed);

}  // namespace tmppi::nn
