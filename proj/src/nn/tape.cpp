#include "tmppi/nn/tape.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace tmppi::nn {

std::size_t ParameterSet::add(const std::string& name, Matrix value) {
  if (index_.count(name) != 0) throw std::invalid_argument("duplicate parameter name '" + name + "'");
  index_[name] = values_.size();
  names_.push_back(name);
  values_.push_back(std::move(value));
  return values_.size() - 1;
}

std::size_t ParameterSet::index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
  return it->second;
}

std::vector<Matrix> ParameterSet::zeros_like() const {
  std::vector<Matrix> out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(Matrix::Zero(v.rows(), v.cols()));
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

Tape::Var Tape::push(Matrix value, bool needs_grad) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = record_ && needs_grad;
  nodes_.push_back(std::move(node));
  return Var{static_cast<int>(nodes_.size() - 1)};
}

template <typename Expr>
void Tape::accumulate_expr(Var v, const Expr& g) {
  Node& n = nodes_[v.id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::accumulate(Var v, const Matrix& g) { accumulate_expr(v, g); }

Tape::Var Tape::constant(Matrix value) { return push(std::move(value), false); }

Tape::Var Tape::param(const ParameterSet& params, std::size_t index) {
  Var v = push(params.value(index), true);
  nodes_[v.id].param_index = static_cast<long>(index);
  return v;
}

Tape::Var Tape::matmul(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.cols() != bv.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out = av * bv;
  Var r = push(std::move(out), needs(a) || needs(b));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, b, r] {
      const Matrix& g = nodes_[r.id].grad;
      if (needs(a)) accumulate_expr(a, g * nodes_[b.id].value.transpose());
      if (needs(b)) accumulate_expr(b, nodes_[a.id].value.transpose() * g);
    };
  }
  return r;
}

Tape::Var Tape::add(Var a, Var b) {
  if (value(a).rows() != value(b).rows() || value(a).cols() != value(b).cols()) {
    throw std::invalid_argument("add: shape mismatch");
  }
  Var r = push(value(a) + value(b), needs(a) || needs(b));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, b, r] {
      const Matrix& g = nodes_[r.id].grad;
      accumulate(a, g);
      accumulate(b, g);
    };
  }
  return r;
}

Tape::Var Tape::add_row(Var a, Var row) {
  if (value(row).rows() != 1 || value(row).cols() != value(a).cols()) {
    throw std::invalid_argument("add_row: row must be 1 x cols");
  }
  Matrix out = value(a);
  out.rowwise() += value(row).row(0);
  Var r = push(std::move(out), needs(a) || needs(row));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, row, r] {
      const Matrix& g = nodes_[r.id].grad;
      accumulate(a, g);
      if (needs(row)) accumulate_expr(row, g.colwise().sum());
    };
  }
  return r;
}

Tape::Var Tape::relu(Var a) {
  Var r = push(value(a).cwiseMax(0.0), needs(a));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, r] {
      const Matrix& g = nodes_[r.id].grad;
      accumulate_expr(a, (nodes_[a.id].value.array() > 0.0).select(g.array(), 0.0).matrix());
    };
  }
  return r;
}

Tape::Var Tape::dropout(Var a, double p, SeededRng* rng) {
  if (rng == nullptr || p <= 0.0) return a;
  const Matrix& av = value(a);
  auto mask = std::make_shared<Matrix>(av.rows(), av.cols());
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < mask->size(); ++i) mask->data()[i] = rng->uniform() < p ? 0.0 : keep_scale;
  Var r = push(av.cwiseProduct(*mask), needs(a));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, r, mask] { accumulate_expr(a, nodes_[r.id].grad.cwiseProduct(*mask)); };
  }
  return r;
}

Tape::Var Tape::layer_norm(Var x, Var gain, Var bias, double eps) {
  const Matrix& xv = value(x);
  const Eigen::Index rows = xv.rows();
  const Eigen::Index cols = xv.cols();
  auto xhat = std::make_shared<Matrix>(rows, cols);
  auto rstd = std::make_shared<Eigen::VectorXd>(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double mean = xv.row(i).mean();
    const double var = (xv.row(i).array() - mean).square().mean();
    (*rstd)[i] = 1.0 / std::sqrt(var + eps);
    xhat->row(i) = (xv.row(i).array() - mean) * (*rstd)[i];
  }
  Matrix out = xhat->array().rowwise() * value(gain).row(0).array();
  out.rowwise() += value(bias).row(0);
  Var r = push(std::move(out), needs(x) || needs(gain) || needs(bias));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, x, gain, bias, r, xhat, rstd] {
      const Matrix& g = nodes_[r.id].grad;
      if (needs(gain)) accumulate_expr(gain, g.cwiseProduct(*xhat).colwise().sum());
      if (needs(bias)) accumulate_expr(bias, g.colwise().sum());
      if (needs(x)) {
        const Matrix dxhat = g.array().rowwise() * nodes_[gain.id].value.row(0).array();
        const auto n = static_cast<double>(dxhat.cols());
        Matrix dx(dxhat.rows(), dxhat.cols());
        for (Eigen::Index i = 0; i < dxhat.rows(); ++i) {
          const double s1 = dxhat.row(i).sum();
          const double s2 = dxhat.row(i).dot(xhat->row(i));
          dx.row(i) = ((*rstd)[i] / n) * (n * dxhat.row(i).array() - s1 - xhat->row(i).array() * s2);
        }
        accumulate(x, dx);
      }
    };
  }
  return r;
}

Tape::Var Tape::attention(Var q, Var k, Var v, int batch, int heads, bool causal) {
  const Matrix& qv = value(q);
  const Matrix& kv = value(k);
  const Matrix& vv = value(v);
  if (batch < 1 || heads < 1) throw std::invalid_argument("attention: batch and heads must be >= 1");
  if (qv.rows() % batch != 0 || kv.rows() % batch != 0 || kv.rows() != vv.rows()) {
    throw std::invalid_argument("attention: row counts not divisible by batch");
  }
  if (qv.cols() != kv.cols() || qv.cols() % heads != 0 || vv.cols() % heads != 0) {
    throw std::invalid_argument("attention: query/key widths must match and divide by heads");
  }
  const Eigen::Index lq = qv.rows() / batch;
  const Eigen::Index lk = kv.rows() / batch;
  const Eigen::Index dk = qv.cols() / heads;
  const Eigen::Index dvh = vv.cols() / heads;
  if (causal && lq != lk) throw std::invalid_argument("attention: causal mask needs equal lengths");
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  // Softmax maps, one lq x lk block per (sequence, head).
  auto probs = std::make_shared<std::vector<Matrix>>(static_cast<std::size_t>(batch * heads));
  Matrix out(qv.rows(), vv.cols());
  for (int b = 0; b < batch; ++b) {
    for (int h = 0; h < heads; ++h) {
      const auto qb = qv.block(b * lq, h * dk, lq, dk);
      const auto kb = kv.block(b * lk, h * dk, lk, dk);
      const auto vb = vv.block(b * lk, h * dvh, lk, dvh);
      Matrix s = (qb * kb.transpose()) * scale;
      for (Eigen::Index i = 0; i < lq; ++i) {
        const Eigen::Index visible = causal ? i + 1 : lk;
        const double m = s.row(i).head(visible).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index j = 0; j < lk; ++j) {
          const double e = j < visible ? std::exp(s(i, j) - m) : 0.0;
          s(i, j) = e;
          sum += e;
        }
        s.row(i) /= sum;
      }
      out.block(b * lq, h * dvh, lq, dvh).noalias() = s * vb;
      (*probs)[static_cast<std::size_t>(b * heads + h)] = std::move(s);
    }
  }
  if (keep_maps_) {
    for (const auto& p : *probs) attention_maps_.push_back(p);
  }

  Var r = push(std::move(out), needs(q) || needs(k) || needs(v));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, q, k, v, r, probs, batch, heads, lq, lk, dk, dvh, scale] {
      const Matrix& g = nodes_[r.id].grad;
      const Matrix& qv = nodes_[q.id].value;
      const Matrix& kv = nodes_[k.id].value;
      const Matrix& vv = nodes_[v.id].value;
      Matrix dq = Matrix::Zero(qv.rows(), qv.cols());
      Matrix dkm = Matrix::Zero(kv.rows(), kv.cols());
      Matrix dv = Matrix::Zero(vv.rows(), vv.cols());
      for (int b = 0; b < batch; ++b) {
        for (int h = 0; h < heads; ++h) {
          const Matrix& p = (*probs)[static_cast<std::size_t>(b * heads + h)];
          const auto gb = g.block(b * lq, h * dvh, lq, dvh);
          const auto qb = qv.block(b * lq, h * dk, lq, dk);
          const auto kb = kv.block(b * lk, h * dk, lk, dk);
          const auto vb = vv.block(b * lk, h * dvh, lk, dvh);
          dv.block(b * lk, h * dvh, lk, dvh).noalias() += p.transpose() * gb;
          const Matrix dp = gb * vb.transpose();
          Matrix ds = p.cwiseProduct(dp);
          const Eigen::VectorXd row_dot = ds.rowwise().sum();
          ds -= p.cwiseProduct(row_dot.replicate(1, lk));
          ds *= scale;
          dq.block(b * lq, h * dk, lq, dk).noalias() += ds * kb;
          dkm.block(b * lk, h * dk, lk, dk).noalias() += ds.transpose() * qb;
        }
      }
      accumulate(q, dq);
      accumulate(k, dkm);
      accumulate(v, dv);
    };
  }
  return r;
}

Tape::Var Tape::huber(Var pred, const Matrix& target, double delta) {
  const Matrix& pv = value(pred);
  if (pv.rows() != target.rows() || pv.cols() != target.cols()) throw std::invalid_argument("huber: shape mismatch");
  if (!(delta > 0.0)) throw std::invalid_argument("huber: delta must be > 0");
  const Matrix err = pv - target;
  double total = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double a = std::abs(err.data()[i]);
    total += a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta);
  }
  const auto count = static_cast<double>(err.size());
  Matrix out(1, 1);
  out(0, 0) = total / count;
  Var r = push(std::move(out), needs(pred));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, pred, r, err, delta, count] {
      const double g = nodes_[r.id].grad(0, 0) / count;
      Matrix d = err.cwiseMax(-delta).cwiseMin(delta) * g;
      accumulate(pred, d);
    };
  }
  return r;
}

Tape::Var Tape::interleave(Var a, Var b, int batch, int per_group) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.rows() != static_cast<Eigen::Index>(batch) * per_group || bv.rows() != batch || av.cols() != bv.cols()) {
    throw std::invalid_argument("interleave: shape mismatch");
  }
  const int group = per_group + 1;
  Matrix out(static_cast<Eigen::Index>(batch) * group, av.cols());
  for (int i = 0; i < batch; ++i) {
    out.middleRows(static_cast<Eigen::Index>(i) * group, per_group) =
        av.middleRows(static_cast<Eigen::Index>(i) * per_group, per_group);
    out.row(static_cast<Eigen::Index>(i) * group + per_group) = bv.row(i);
  }
  Var r = push(std::move(out), needs(a) || needs(b));
  if (nodes_[r.id].needs_grad) {
    nodes_[r.id].back = [this, a, b, r, batch, per_group, group] {
      const Matrix& g = nodes_[r.id].grad;
      Matrix ga(static_cast<Eigen::Index>(batch) * per_group, g.cols());
      Matrix gb(batch, g.cols());
      for (int i = 0; i < batch; ++i) {
        ga.middleRows(static_cast<Eigen::Index>(i) * per_group, per_group) =
            g.middleRows(static_cast<Eigen::Index>(i) * group, per_group);
        gb.row(i) = g.row(static_cast<Eigen::Index>(i) * group + per_group);
      }
      accumulate(a, ga);
      accumulate(b, gb);
    };
  }
  return r;
}

void Tape::backward(Var out, std::vector<Matrix>& grads) {
  if (!record_) throw std::logic_error("backward on a tape that does not record gradients");
  Node& root = nodes_[out.id];
  if (root.value.size() != 1) throw std::invalid_argument("backward: output must be a scalar");
  if (!root.needs_grad) return;
  root.grad = Matrix::Ones(1, 1);
  for (int i = out.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.back) n.back();
    if (n.param_index >= 0) {
      Matrix& dst = grads.at(static_cast<std::size_t>(n.param_index));
      if (dst.rows() != n.grad.rows() || dst.cols() != n.grad.cols()) {
        throw std::invalid_argument("backward: gradient buffer shape mismatch");
      }
      dst += n.grad;
    }
  }
}

}  // namespace tmppi::nn
