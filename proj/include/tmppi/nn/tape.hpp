#pragma once

#include <Eigen/Core>

#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tmppi/core/rng.hpp"

namespace tmppi::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Named parameter tensors, stored in creation order.
class ParameterSet {
 public:
  /// Returns the index of the new tensor. Names must be unique.
  std::size_t add(const std::string& name, Matrix value);

  std::size_t size() const { return values_.size(); }
  std::size_t index(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  const std::string& name(std::size_t i) const { return names_[i]; }
  const Matrix& value(std::size_t i) const { return values_[i]; }
  Matrix& value(std::size_t i) { return values_[i]; }
  const Matrix& value(const std::string& name) const { return values_[index(name)]; }
  Matrix& value(const std::string& name) { return values_[index(name)]; }

  std::vector<Matrix>& values() { return values_; }
  const std::vector<Matrix>& values() const { return values_; }

  /// Zero-filled tensors with matching shapes.
  std::vector<Matrix> zeros_like() const;
  std::size_t scalar_count() const;

 private:
  std::vector<std::string> names_;
  std::vector<Matrix> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Reverse-mode automatic differentiation over dense matrices.
///
/// Every op appends a node holding its value and, when gradients are
/// recorded, a closure that pushes the node's gradient to its inputs.
/// `backward` walks the nodes in reverse creation order, which is a valid
/// topological order because inputs always precede their consumers.
class Tape {
 public:
  struct Var {
    int id = -1;
  };

  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}

  bool recording() const { return record_; }

  Var constant(Matrix value);
  /// Leaf bound to parameter `index` of `params`; its gradient lands in
  /// grads[index] during backward.
  Var param(const ParameterSet& params, std::size_t index);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// a + row, with `row` (1 x cols) broadcast over every row of a.
  Var add_row(Var a, Var row);
  Var relu(Var a);
  /// Inverted dropout; identity when rng is null or p == 0.
  Var dropout(Var a, double p, SeededRng* rng);
  /// Row-wise normalization followed by gain and bias (both 1 x cols).
  Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
  /// Scaled dot-product attention for `batch` independent sequences and
  /// `heads` column groups. q has batch*len_q rows, k and v batch*len_k rows.
  Var attention(Var q, Var k, Var v, int batch, int heads, bool causal);
  /// Mean Huber loss against a fixed target (1 x 1 result).
  Var huber(Var pred, const Matrix& target, double delta);
  /// Places `batch` groups of `per_group` rows from a, each followed by one
  /// row of b: result has batch * (per_group + 1) rows.
  Var interleave(Var a, Var b, int batch, int per_group);

  /// Softmax maps produced by every attention op (for inspection in tests).
  const std::vector<Matrix>& attention_maps() const { return attention_maps_; }
  void keep_attention_maps(bool keep) { keep_maps_ = keep; }

  /// Seeds d(out)/d(out) = 1 for a 1x1 output and accumulates parameter
  /// gradients into `grads` (shapes must match the ParameterSet).
  void backward(Var out, std::vector<Matrix>& grads);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    long param_index = -1;
    std::function<void()> back;
  };

  Var push(Matrix value, bool needs_grad);
  bool needs(Var v) const { return nodes_[v.id].needs_grad; }
  void accumulate(Var v, const Matrix& g);
  template <typename Expr>
  void accumulate_expr(Var v, const Expr& g);

  bool record_;
  bool keep_maps_ = false;
  std::vector<Node> nodes_;
  std::vector<Matrix> attention_maps_;
};

}  // namespace tmppi::nn
