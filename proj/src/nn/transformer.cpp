#include "tmppi/nn/transformer.hpp"

#include <cmath>

#include "tmppi/core/types.hpp"

namespace tmppi::nn {

void TransformerConfig::validate() const {
  if (d_model < 2 || d_model % 2 != 0) throw ConfigError("transformer: d_model must be even and >= 2");
  if (num_heads < 1 || d_model % num_heads != 0) throw ConfigError("transformer: d_model must be divisible by heads");
  if (num_layers < 1) throw ConfigError("transformer: num_layers must be >= 1");
  if (d_ff < 1) throw ConfigError("transformer: d_ff must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("transformer: dropout must lie in [0, 1)");
  if (k_past < 1 || horizon < 1) throw ConfigError("transformer: k_past and horizon must be >= 1");
  if (state_dim < 1 || control_dim < 1 || context_dim < 1) throw ConfigError("transformer: dimensions must be >= 1");
}

Matrix positional_encoding(int length, int d_model) {
  if (length < 1 || d_model < 1) throw ConfigError("positional_encoding: sizes must be >= 1");
  if (d_model % 2 != 0) throw ConfigError("positional_encoding: d_model must be even");
  Matrix pe(length, d_model);
  for (int pos = 0; pos < length; ++pos) {
    for (int i = 0; i < d_model / 2; ++i) {
      const double angle = pos / std::pow(10000.0, (2.0 * i) / d_model);
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v, bool causal) {
  Tape tape(false);
  const auto out = tape.attention(tape.constant(q), tape.constant(k), tape.constant(v), 1, 1, causal);
  return tape.value(out);
}

Matrix multi_head_attention(const Matrix& x_q, const Matrix& x_kv, const Matrix& wq, const Matrix& wk,
                            const Matrix& wv, const Matrix& wo, int heads, bool causal) {
  Tape tape(false);
  const auto q = tape.matmul(tape.constant(x_q), tape.constant(wq));
  const auto k = tape.matmul(tape.constant(x_kv), tape.constant(wk));
  const auto v = tape.matmul(tape.constant(x_kv), tape.constant(wv));
  const auto a = tape.attention(q, k, v, 1, heads, causal);
  return tape.value(tape.matmul(a, tape.constant(wo)));
}

Matrix ffn(const Matrix& x, const Matrix& w1, const Matrix& b1, const Matrix& w2, const Matrix& b2) {
  Tape tape(false);
  auto h = tape.relu(tape.add_row(tape.matmul(tape.constant(x), tape.constant(w1)), tape.constant(b1)));
  return tape.value(tape.add_row(tape.matmul(h, tape.constant(w2)), tape.constant(b2)));
}

namespace {

Matrix glorot(int fan_in, int fan_out, SeededRng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-limit, limit);
  return m;
}

void add_linear(ParameterSet& ps, const std::string& prefix, int in, int out, SeededRng& rng) {
  ps.add(prefix + ".w", glorot(in, out, rng));
  ps.add(prefix + ".b", Matrix::Zero(1, out));
}

void add_attention(ParameterSet& ps, const std::string& prefix, int d, SeededRng& rng) {
  for (const char* name : {".wq", ".wk", ".wv", ".wo"}) ps.add(prefix + name, glorot(d, d, rng));
}

void add_norm(ParameterSet& ps, const std::string& prefix, int d) {
  ps.add(prefix + ".gain", Matrix::Ones(1, d));
  ps.add(prefix + ".bias", Matrix::Zero(1, d));
}

void add_ffn(ParameterSet& ps, const std::string& prefix, int d, int d_ff, SeededRng& rng) {
  ps.add(prefix + ".w1", glorot(d, d_ff, rng));
  ps.add(prefix + ".b1", Matrix::Zero(1, d_ff));
  ps.add(prefix + ".w2", glorot(d_ff, d, rng));
  ps.add(prefix + ".b2", Matrix::Zero(1, d));
}

}  // namespace

ParameterSet init_transformer_params(const TransformerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SeededRng rng(seed, 0x696e6974);  // "init"
  ParameterSet ps;
  const int d = cfg.d_model;
  add_linear(ps, "embed.state", cfg.state_dim, d, rng);
  add_linear(ps, "embed.context", cfg.context_dim, d, rng);
  add_linear(ps, "embed.control", cfg.control_dim, d, rng);
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::string pre = "enc." + std::to_string(l);
    add_attention(ps, pre + ".self", d, rng);
    add_norm(ps, pre + ".norm1", d);
    add_ffn(ps, pre + ".ffn", d, cfg.d_ff, rng);
    add_norm(ps, pre + ".norm2", d);
  }
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::string pre = "dec." + std::to_string(l);
    add_attention(ps, pre + ".self", d, rng);
    add_norm(ps, pre + ".norm1", d);
    add_attention(ps, pre + ".cross", d, rng);
    add_norm(ps, pre + ".norm2", d);
    add_ffn(ps, pre + ".ffn", d, cfg.d_ff, rng);
    add_norm(ps, pre + ".norm3", d);
  }
  add_linear(ps, "head", d, cfg.control_dim, rng);
  return ps;
}

Transformer::Transformer(TransformerConfig cfg, std::uint64_t seed)
    : cfg_(cfg), params_(init_transformer_params(cfg, seed)) {}

Transformer::Transformer(TransformerConfig cfg, ParameterSet params) : cfg_(cfg), params_(std::move(params)) {
  cfg_.validate();
  check_shapes();
}

void Transformer::check_shapes() const {
  const ParameterSet reference = init_transformer_params(cfg_, 0);
  if (reference.size() != params_.size()) throw ConfigError("transformer: parameter count does not match config");
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const std::string& name = reference.name(i);
    if (!params_.contains(name)) throw ConfigError("transformer: missing parameter '" + name + "'");
    const Matrix& got = params_.value(name);
    if (got.rows() != reference.value(i).rows() || got.cols() != reference.value(i).cols()) {
      throw ConfigError("transformer: parameter '" + name + "' has the wrong shape");
    }
    if (!got.allFinite()) throw ConfigError("transformer: parameter '" + name + "' is not finite");
  }
}

Tape::Var Transformer::p(Tape& tape, const std::string& name) const {
  return tape.param(params_, params_.index(name));
}

Tape::Var Transformer::linear(Tape& tape, Tape::Var x, const std::string& prefix) const {
  return tape.add_row(tape.matmul(x, p(tape, prefix + ".w")), p(tape, prefix + ".b"));
}

Tape::Var Transformer::mha(Tape& tape, Tape::Var x_q, Tape::Var x_kv, const std::string& prefix, int batch,
                           bool causal) const {
  const auto q = tape.matmul(x_q, p(tape, prefix + ".wq"));
  const auto k = tape.matmul(x_kv, p(tape, prefix + ".wk"));
  const auto v = tape.matmul(x_kv, p(tape, prefix + ".wv"));
  const auto heads = tape.attention(q, k, v, batch, cfg_.num_heads, causal);
  return tape.matmul(heads, p(tape, prefix + ".wo"));
}

Tape::Var Transformer::feed_forward(Tape& tape, Tape::Var x, const std::string& prefix) const {
  auto h = tape.relu(tape.add_row(tape.matmul(x, p(tape, prefix + ".w1")), p(tape, prefix + ".b1")));
  return tape.add_row(tape.matmul(h, p(tape, prefix + ".w2")), p(tape, prefix + ".b2"));
}

Tape::Var Transformer::add_norm(Tape& tape, Tape::Var residual, Tape::Var sublayer, const std::string& prefix,
                                SeededRng* dropout_rng) const {
  const auto dropped = tape.dropout(sublayer, cfg_.dropout, dropout_rng);
  return tape.layer_norm(tape.add(residual, dropped), p(tape, prefix + ".gain"), p(tape, prefix + ".bias"));
}

Matrix Transformer::tiled_positions(int len, int batch) const {
  const Matrix pe = positional_encoding(len, cfg_.d_model);
  Matrix out(static_cast<Eigen::Index>(len) * batch, cfg_.d_model);
  for (int b = 0; b < batch; ++b) out.middleRows(static_cast<Eigen::Index>(b) * len, len) = pe;
  return out;
}

Tape::Var Transformer::encode(Tape& tape, const Matrix& states, const Matrix& contexts, int batch,
                              SeededRng* dropout_rng) const {
  if (states.rows() != static_cast<Eigen::Index>(batch) * cfg_.k_past || states.cols() != cfg_.state_dim) {
    throw std::invalid_argument("encode: states must be (batch * k_past) x state_dim");
  }
  if (contexts.rows() != batch || contexts.cols() != cfg_.context_dim) {
    throw std::invalid_argument("encode: contexts must be batch x context_dim");
  }
  const auto state_tokens = linear(tape, tape.constant(states), "embed.state");
  const auto context_tokens = linear(tape, tape.constant(contexts), "embed.context");
  auto z = tape.interleave(state_tokens, context_tokens, batch, cfg_.k_past);
  z = tape.add(z, tape.constant(tiled_positions(cfg_.k_past + 1, batch)));
  z = tape.dropout(z, cfg_.dropout, dropout_rng);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    const std::string pre = "enc." + std::to_string(l);
    z = add_norm(tape, z, mha(tape, z, z, pre + ".self", batch, false), pre + ".norm1", dropout_rng);
    z = add_norm(tape, z, feed_forward(tape, z, pre + ".ffn"), pre + ".norm2", dropout_rng);
  }
  return z;
}

Tape::Var Transformer::decode(Tape& tape, const Matrix& tokens, Tape::Var memory, int batch,
                              SeededRng* dropout_rng) const {
  if (tokens.rows() % batch != 0 || tokens.cols() != cfg_.control_dim) {
    throw std::invalid_argument("decode: tokens must be (batch * len) x control_dim");
  }
  const int len = static_cast<int>(tokens.rows() / batch);
  auto z = linear(tape, tape.constant(tokens), "embed.control");
  z = tape.add(z, tape.constant(tiled_positions(len, batch)));
  z = tape.dropout(z, cfg_.dropout, dropout_rng);
  for (int l = 0; l < cfg_.num_layers; ++l) {
    const std::string pre = "dec." + std::to_string(l);
    z = add_norm(tape, z, mha(tape, z, z, pre + ".self", batch, true), pre + ".norm1", dropout_rng);
    z = add_norm(tape, z, mha(tape, z, memory, pre + ".cross", batch, false), pre + ".norm2", dropout_rng);
    z = add_norm(tape, z, feed_forward(tape, z, pre + ".ffn"), pre + ".norm3", dropout_rng);
  }
  return linear(tape, z, "head");
}

Matrix Transformer::encoder_forward(const EncoderInput& input) const {
  Tape tape(false);
  Matrix ctx = input.context.transpose();
  return tape.value(encode(tape, input.past_states, ctx, 1, nullptr));
}

Matrix Transformer::decoder_forward(const Matrix& tokens, const Matrix& memory) const {
  Tape tape(false);
  return tape.value(decode(tape, tokens, tape.constant(memory), 1, nullptr));
}

Matrix Transformer::predict_autoregressive(const EncoderInput& input, int horizon) const {
  if (horizon < 1) throw std::invalid_argument("predict_autoregressive: horizon must be >= 1");
  const Matrix memory = encoder_forward(input);
  Matrix tokens = Matrix::Zero(1, cfg_.control_dim);
  Matrix predictions(horizon, cfg_.control_dim);
  for (int j = 0; j < horizon; ++j) {
    const Matrix out = decoder_forward(tokens, memory);
    predictions.row(j) = out.row(j);
    if (j + 1 < horizon) {
      tokens.conservativeResize(j + 2, Eigen::NoChange);
      tokens.row(j + 1) = out.row(j);
    }
  }
  return predictions;
}

Matrix Transformer::shifted_targets(const Matrix& targets) {
  Matrix out = Matrix::Zero(targets.rows(), targets.cols());
  if (targets.rows() > 1) out.bottomRows(targets.rows() - 1) = targets.topRows(targets.rows() - 1);
  return out;
}

}  // namespace tmppi::nn
