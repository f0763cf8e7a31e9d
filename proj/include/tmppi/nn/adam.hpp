#pragma once

#include <vector>

#include "tmppi/nn/tape.hpp"

namespace tmppi::nn {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias-corrected first and second moments.
class Adam {
 public:
  Adam(const ParameterSet& params, AdamConfig cfg = {});

  /// theta -= lr * m_hat / (sqrt(v_hat) + eps), elementwise.
  void step(ParameterSet& params, const std::vector<Matrix>& grads);

  long steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  long t_ = 0;
};

}  // namespace tmppi::nn
