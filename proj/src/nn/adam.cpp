#include "tmppi/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace tmppi::nn {

Adam::Adam(const ParameterSet& params, AdamConfig cfg) : cfg_(cfg), m_(params.zeros_like()), v_(params.zeros_like()) {
  if (!(cfg_.lr > 0.0) || !(cfg_.eps > 0.0)) throw std::invalid_argument("adam: lr and eps must be positive");
  if (!(cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0) || !(cfg_.beta2 >= 0.0 && cfg_.beta2 < 1.0)) {
    throw std::invalid_argument("adam: betas must lie in [0, 1)");
  }
}

void Adam::step(ParameterSet& params, const std::vector<Matrix>& grads) {
  if (grads.size() != params.size() || m_.size() != params.size()) {
    throw std::invalid_argument("adam: gradient count does not match parameters");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i].array();
    auto m = m_[i].array();
    auto v = v_[i].array();
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.square();
    params.value(i).array() -= cfg_.lr * (m / c1) / ((v / c2).sqrt() + cfg_.eps);
  }
}

}  // namespace tmppi::nn
