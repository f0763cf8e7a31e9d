#include "tmppi/harness/policy.hpp"

#include "tmppi/data/window.hpp"

namespace tmppi::harness {

ControlSequence TransformerPolicy::predict(const data::RowMatrix& states, int t, const Context& context,
                                          const ControlBounds& bounds) const {
  const auto& cfg = model.config();
  nn::EncoderInput input;
  input.past_states = normalizer.states.apply(data::past_states(states, t, cfg.k_past));
  input.context = normalizer.context.apply(Eigen::VectorXd(context));
  const nn::Matrix normalized = model.predict_autoregressive(input, cfg.horizon);
  ControlSequence mean = normalizer.controls.invert(data::RowMatrix(normalized));
  bounds.clamp_rows(mean);
  return mean;
}

data::MeanInitializer TransformerPolicy::initializer(const ControlBounds& bounds) const {
  return [this, bounds](const data::StepView& view) { return predict(*view.states, view.t, view.context, bounds); };
}

void TransformerPolicy::check_compatible(int state_dim, int control_dim, int context_dim, int horizon) const {
  const auto& c = model.config();
  if (c.state_dim != state_dim || c.control_dim != control_dim || c.context_dim != context_dim) {
    throw ConfigError("model dimensions (n=" + std::to_string(c.state_dim) + ", m=" + std::to_string(c.control_dim) +
                      ", p=" + std::to_string(c.context_dim) + ") do not match the environment (n=" +
                      std::to_string(state_dim) + ", m=" + std::to_string(control_dim) +
                      ", p=" + std::to_string(context_dim) + ")");
  }
  if (c.horizon != horizon) {
    throw ConfigError("model horizon " + std::to_string(c.horizon) + " does not match MPPI horizon " +
                      std::to_string(horizon));
  }
  if (normalizer.states.channels() != state_dim || normalizer.controls.channels() != control_dim ||
      normalizer.context.channels() != context_dim) {
    throw ConfigError("stored normalization does not match the model dimensions");
  }
}

void save_policy(const std::filesystem::path& path, const TransformerPolicy& policy) {
  nn::ModelFile mf{policy.model.config(), policy.model.params(), {}};
  mf.extras.add("norm.states", policy.normalizer.states.quantiles());
  mf.extras.add("norm.controls", policy.normalizer.controls.quantiles());
  mf.extras.add("norm.context", policy.normalizer.context.quantiles());
  nn::save_model(path, mf);
}

TransformerPolicy load_policy(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("model file '" + path.string() + "' does not exist");
  nn::ModelFile mf = nn::load_model(path);
  for (const char* name : {"norm.states", "norm.controls", "norm.context"}) {
    if (!mf.extras.contains(name)) throw FormatError(std::string("model file lacks '") + name + "'");
  }
  data::Normalizer norm;
  try {
    norm.states = data::QuantileTransform::from_quantiles(mf.extras.value("norm.states"));
    norm.controls = data::QuantileTransform::from_quantiles(mf.extras.value("norm.controls"));
    norm.context = data::QuantileTransform::from_quantiles(mf.extras.value("norm.context"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("model file: bad normalization table: ") + e.what());
  }
  TransformerPolicy policy{nn::Transformer(mf.config, std::move(mf.params)), std::move(norm)};
  policy.check_compatible(mf.config.state_dim, mf.config.control_dim, mf.config.context_dim, mf.config.horizon);
  return policy;
}

}  // namespace tmppi::harness
