#include "tmppi/harness/presets.hpp"

#include <algorithm>
#include <limits>

#include "tmppi/data/window.hpp"

namespace tmppi::harness {

namespace {

int to_int(long long v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(std::string("config key '") + key + "' out of range");
  }
  return static_cast<int>(v);
}

ControlInput vec2(double a, double b) {
  ControlInput v(2);
  v << a, b;
  return v;
}

std::vector<data::WindowSample> stride(std::vector<data::WindowSample> v, int cap) {
  if (cap <= 0 || v.size() <= static_cast<std::size_t>(cap)) return v;
  std::vector<data::WindowSample> out;
  out.reserve(static_cast<std::size_t>(cap));
  const double step = static_cast<double>(v.size()) / cap;
  for (int i = 0; i < cap; ++i) out.push_back(std::move(v[static_cast<std::size_t>(i * step)]));
  return out;
}

}  // namespace

env::EnvironmentSpec default_env(env::EnvKind kind, bool full_racing) {
  env::EnvironmentSpec spec;
  spec.kind = kind;
  if (kind == env::EnvKind::Racing && !full_racing) {
    spec.racing.straight_length = 20.0;
    spec.racing.turn_radius = 10.0;
    spec.racing.num_obstacles = 4;
    spec.racing.max_steps = 300;
  }
  return spec;
}

mppi::MppiConfig default_mppi(env::EnvKind kind, bool full_racing) {
  mppi::MppiConfig c;
  if (kind == env::EnvKind::Navigation) {
    c.num_samples = 256;
    c.horizon = 20;
    c.temperature = 0.01;
    c.noise_cov = DiagonalCovariance(vec2(1.0, 1.0));
    c.bounds = env::nav_control_bounds();
  } else {
    c.num_samples = full_racing ? 5000 : 1024;
    c.horizon = 25;
    c.temperature = 1.0;
    c.noise_cov = DiagonalCovariance(vec2(1.0, 0.2 * 0.2));
    c.bounds = env::racing_control_bounds();
  }
  return c;
}

TrainingPlan default_training(const env::EnvironmentSpec& env, int horizon) {
  TrainingPlan p;
  p.model.state_dim = env.state_dim();
  p.model.control_dim = env.control_dim();
  p.model.context_dim = env.context_dim();
  p.model.horizon = horizon;
  return p;
}

TrainingPlan desk_training(const env::EnvironmentSpec& env, int horizon) {
  TrainingPlan p = default_training(env, horizon);
  p.model.d_model = 64;
  p.model.num_layers = 2;
  p.model.num_heads = 4;
  p.model.d_ff = 256;
  p.train.max_epochs = 60;
  p.train.patience = 15;
  p.max_train_windows = 8192;
  p.max_val_windows = 2048;
  return p;
}

env::EnvironmentSpec env_from_config(const KvConfig& cfg) {
  const auto kind = env::env_kind_from_string(cfg.get_string("environment", "navigation"));
  const std::string preset = cfg.get_string("racing.preset", "reduced");
  if (preset != "reduced" && preset != "full") throw ConfigError("racing.preset must be reduced or full");
  return env::env_spec_from_config(cfg, default_env(kind, preset == "full"));
}

mppi::MppiConfig mppi_from_config(const KvConfig& cfg, const env::EnvironmentSpec& env) {
  mppi::MppiConfig c = default_mppi(env.kind, cfg.get_string("racing.preset", "reduced") == "full");
  c.num_samples = to_int(cfg.get_int("mppi.samples", c.num_samples), "mppi.samples");
  c.horizon = to_int(cfg.get_int("mppi.horizon", c.horizon), "mppi.horizon");
  c.temperature = cfg.get_double("mppi.lambda", c.temperature);
  const ControlInput sd = c.noise_cov.std_devs();
  const auto noise = cfg.get_doubles("mppi.noise_std", {sd[0], sd[1]});
  if (static_cast<int>(noise.size()) != env.control_dim()) throw ConfigError("mppi.noise_std needs one entry per control");
  ControlInput var(env.control_dim());
  for (int i = 0; i < env.control_dim(); ++i) var[i] = noise[static_cast<std::size_t>(i)] * noise[static_cast<std::size_t>(i)];
  c.noise_cov = DiagonalCovariance(var);
  c.sg_window = to_int(cfg.get_int("mppi.sg_window", c.sg_window), "mppi.sg_window");
  c.sg_order = to_int(cfg.get_int("mppi.sg_order", c.sg_order), "mppi.sg_order");
  const std::string corr = cfg.get_string("mppi.correction", "verbatim");
  if (corr == "verbatim") {
    c.correction = mppi::ImportanceCorrection::Verbatim;
  } else if (corr == "symmetric") {
    c.correction = mppi::ImportanceCorrection::Symmetric;
  } else if (corr == "none") {
    c.correction = mppi::ImportanceCorrection::None;
  } else {
    throw ConfigError("mppi.correction must be verbatim, symmetric or none");
  }
  c.validate();
  return c;
}

ExperimentConfig experiment_from_config(const KvConfig& cfg) {
  ExperimentConfig e;
  e.env = env_from_config(cfg);
  e.mppi = mppi_from_config(cfg, e.env);
  const bool racing = e.env.kind == env::EnvKind::Racing;
  const bool full = cfg.get_string("racing.preset", "reduced") == "full";
  std::vector<long long> default_samples{50, 100, 200, 300, 400, 500};
  if (racing) {
    default_samples = full ? std::vector<long long>{5000, 6000, 7000, 8000, 9000, 10000}
                           : std::vector<long long>{256, 512, 1024};
  }
  e.sample_counts.clear();
  for (long long k : cfg.get_ints("sweep.samples", default_samples)) e.sample_counts.push_back(to_int(k, "sweep.samples"));
  e.controllers.clear();
  for (const auto& s : cfg.get_strings("sweep.controllers", {"mppi"})) e.controllers.push_back(controller_from_string(s));
  e.episodes = to_int(cfg.get_int("sweep.episodes", e.episodes), "sweep.episodes");
  e.dynamic_counts.clear();
  for (long long d : cfg.get_ints("sweep.dynamic", {e.env.nav.num_dynamic})) {
    e.dynamic_counts.push_back(to_int(d, "sweep.dynamic"));
  }
  e.timing = cfg.get_bool("sweep.timing", false);
  e.model_path = cfg.get_string("model.path", "");
  e.validate();
  return e;
}

data::CollectConfig collect_from_config(const KvConfig& cfg) {
  data::CollectConfig c;
  c.env = env_from_config(cfg);
  c.mppi = mppi_from_config(cfg, c.env);
  c.episodes = to_int(cfg.get_int("collect.episodes", c.env.kind == env::EnvKind::Navigation ? 1000 : 300),
                      "collect.episodes");
  c.include_failures = cfg.get_bool("collect.include_failures", false);
  c.mppi.num_samples = to_int(cfg.get_int("collect.samples", c.mppi.num_samples), "collect.samples");
  c.k_past = to_int(cfg.get_int("train.k_past", c.k_past), "train.k_past");
  return c;
}

TrainingPlan training_from_config(const KvConfig& cfg, const env::EnvironmentSpec& env, int horizon) {
  const std::string preset = cfg.get_string("train.preset", "desk");
  if (preset != "desk" && preset != "full") throw ConfigError("train.preset must be desk or full");
  TrainingPlan p = preset == "desk" ? desk_training(env, horizon) : default_training(env, horizon);
  auto& m = p.model;
  m.d_model = to_int(cfg.get_int("train.d_model", m.d_model), "train.d_model");
  m.num_layers = to_int(cfg.get_int("train.layers", m.num_layers), "train.layers");
  m.num_heads = to_int(cfg.get_int("train.heads", m.num_heads), "train.heads");
  m.d_ff = to_int(cfg.get_int("train.d_ff", cfg.has("train.d_model") ? 4 * m.d_model : m.d_ff), "train.d_ff");
  m.dropout = cfg.get_double("train.dropout", m.dropout);
  m.k_past = to_int(cfg.get_int("train.k_past", m.k_past), "train.k_past");
  auto& t = p.train;
  t.batch_size = to_int(cfg.get_int("train.batch_size", t.batch_size), "train.batch_size");
  t.max_epochs = to_int(cfg.get_int("train.max_epochs", t.max_epochs), "train.max_epochs");
  t.patience = to_int(cfg.get_int("train.patience", t.patience), "train.patience");
  t.adam.lr = cfg.get_double("train.lr", t.adam.lr);
  t.huber_delta = cfg.get_double("train.huber_delta", t.huber_delta);
  p.train_ratio = cfg.get_double("train.train_ratio", p.train_ratio);
  p.n_quantiles = to_int(cfg.get_int("train.quantiles", p.n_quantiles), "train.quantiles");
  p.max_train_windows = to_int(cfg.get_int("train.max_windows", p.max_train_windows), "train.max_windows");
  p.max_val_windows = to_int(cfg.get_int("train.max_val_windows", p.max_val_windows), "train.max_val_windows");
  m.validate();
  return p;
}

TrainOutcome train_policy(const data::Dataset& dataset, const TrainingPlan& plan, std::uint64_t seed,
                          const nn::EpochCallback& on_epoch) {
  nn::TransformerConfig mc = plan.model;
  if (mc.state_dim != dataset.state_dim || mc.control_dim != dataset.control_dim ||
      mc.context_dim != dataset.context_dim) {
    throw ConfigError("training config dimensions do not match the dataset");
  }
  auto [train_raw, val_raw] = data::split(dataset.episodes, mc.k_past, mc.horizon, plan.train_ratio, seed);
  train_raw = stride(std::move(train_raw), plan.max_train_windows);
  val_raw = stride(std::move(val_raw), plan.max_val_windows);
  if (train_raw.empty() || val_raw.empty()) throw std::invalid_argument("train: dataset yields no windows");

  data::Normalizer norm = data::Normalizer::fit(train_raw, plan.n_quantiles);
  const auto train_set = norm.apply(train_raw);
  const auto val_set = norm.apply(val_raw);

  nn::Transformer model(mc, seed);
  nn::TrainConfig tc = plan.train;
  tc.seed = seed;
  nn::TrainResult result = nn::train(model, train_set, val_set, tc, on_epoch);
  return {TransformerPolicy{std::move(model), std::move(norm)}, std::move(result), train_set.size(), val_set.size()};
}

}  // namespace tmppi::harness
