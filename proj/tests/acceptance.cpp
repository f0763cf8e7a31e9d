// End-to-end acceptance run: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tmppi/core/parallel.hpp"
#include "tmppi/data/collect.hpp"
#include "tmppi/data/dataset.hpp"
#include "tmppi/data/quantile.hpp"
#include "tmppi/harness/experiment.hpp"
#include "tmppi/harness/policy.hpp"
#include "tmppi/harness/presets.hpp"
#include "tmppi/harness/sweep.hpp"
#include "tmppi/mppi/engine.hpp"
#include "tmppi/mppi/savitzky_golay.hpp"
#include "tmppi/nn/trainer.hpp"
#include "tmppi/nn/transformer.hpp"

namespace fs = std::filesystem;
using namespace tmppi;

namespace {

constexpr std::uint64_t kEvalSeed = 7;
constexpr std::uint64_t kCollectSeed = 1000;
constexpr std::uint64_t kTrainSeed = 1000;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

fs::path artifact_dir() {
  const fs::path p = fs::current_path() / "acceptance_artifacts";
  fs::create_directories(p);
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Verdict weight_oracle() {
  SeededRng gen(101, 0);
  double worst_w = 0.0, worst_u = 0.0;
  for (int instance = 0; instance < 50; ++instance) {
    mppi::MppiConfig cfg;
    cfg.num_samples = 1 + static_cast<int>(gen.uniform_index(8));
    cfg.horizon = 1 + static_cast<int>(gen.uniform_index(3));
    cfg.temperature = gen.uniform(0.2, 5.0);
    ControlInput var(1);
    var << gen.uniform(0.1, 2.0);
    cfg.noise_cov = DiagonalCovariance(var);
    ControlInput lo(1), hi(1);
    lo << -100.0;
    hi << 100.0;
    cfg.bounds = {lo, hi};
    cfg.sg_window = 1;
    cfg.sg_order = 0;
    ControlSequence mean(cfg.horizon, 1);
    for (int i = 0; i < cfg.horizon; ++i) mean(i, 0) = gen.uniform(-1.0, 1.0);
    const mppi::SampleBatch b = mppi::generate_samples(mean, cfg, gen.fork(instance));
    std::vector<double> costs;
    for (int k = 0; k < cfg.num_samples; ++k) costs.push_back(gen.uniform(0.0, 10.0));

    std::vector<long double> expo(costs.size());
    long double eta = 0.0L;
    for (std::size_t k = 0; k < costs.size(); ++k) {
      long double q = 0.0L;
      for (int i = 0; i < cfg.horizon; ++i) {
        const long double u = mean(i, 0);
        const long double w = u + b.noise[k](i, 0);
        q += (0.5L * u * u - w * w) / var[0];
      }
      expo[k] = -costs[k] / static_cast<long double>(cfg.temperature) + q;
      eta += std::exp(expo[k]);
    }
    const std::vector<double> w = mppi::compute_weights(costs, mean, b.noise, cfg);
    const ControlSequence u = mppi::update_mean(mean, b.noise, w, cfg.bounds);
    for (std::size_t k = 0; k < costs.size(); ++k) {
      const long double ref = std::exp(expo[k]) / eta;
      worst_w = std::max(worst_w, static_cast<double>(std::abs(w[k] - ref) / std::max(ref, 1e-300L)));
    }
    for (int i = 0; i < cfg.horizon; ++i) {
      long double ref = mean(i, 0);
      for (std::size_t k = 0; k < costs.size(); ++k) ref += std::exp(expo[k]) / eta * b.noise[k](i, 0);
      worst_u = std::max(worst_u, static_cast<double>(std::abs(u(i, 0) - ref) / std::max(std::abs(ref), 1e-300L)));
    }
  }
  return {worst_w <= 1e-12 && worst_u <= 1e-12,
          "max rel err weights " + fmt("%.2e", worst_w) + ", mean " + fmt("%.2e", worst_u)};
}

nn::TransformerConfig tiny_config() {
  nn::TransformerConfig cfg;
  cfg.d_model = 8;
  cfg.num_layers = 1;
  cfg.num_heads = 2;
  cfg.d_ff = 16;
  cfg.dropout = 0.0;
  cfg.k_past = 3;
  cfg.horizon = 4;
  cfg.state_dim = 3;
  cfg.control_dim = 2;
  cfg.context_dim = 6;
  return cfg;
}

data::WindowSample random_sample(SeededRng& rng, const nn::TransformerConfig& cfg) {
  data::WindowSample s;
  s.past_states = data::RowMatrix(cfg.k_past, cfg.state_dim);
  s.context = Eigen::VectorXd(cfg.context_dim);
  s.future_controls = data::RowMatrix(cfg.horizon, cfg.control_dim);
  for (Eigen::Index i = 0; i < s.past_states.size(); ++i) s.past_states.data()[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < s.context.size(); ++i) s.context[i] = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < s.future_controls.size(); ++i) s.future_controls.data()[i] = rng.uniform(-2.0, 2.0);
  return s;
}

Verdict gradient_check() {
  const nn::TransformerConfig cfg = tiny_config();
  nn::Transformer model(cfg, 202);
  SeededRng rng(202, 0);
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const std::string& name = model.params().name(i);
    nn::Matrix& v = model.params().value(i);
    if (name.find("bias") != std::string::npos || name.ends_with(".b") || name.ends_with(".b1") ||
        name.ends_with(".b2") || name.find("gain") != std::string::npos) {
      for (Eigen::Index j = 0; j < v.size(); ++j) v.data()[j] += rng.uniform(-0.2, 0.2);
    }
  }
  std::vector<data::WindowSample> samples;
  for (int i = 0; i < 3; ++i) samples.push_back(random_sample(rng, cfg));
  const std::vector<std::size_t> idx{0, 1, 2};
  auto loss = [&] {
    nn::Tape tape(false);
    return tape.value(nn::batch_loss(model, tape, samples, idx, 1.0, nullptr))(0, 0);
  };
  nn::Tape tape(true);
  const auto out = nn::batch_loss(model, tape, samples, idx, 1.0, nullptr);
  std::vector<nn::Matrix> grads = model.params().zeros_like();
  tape.backward(out, grads);

  double worst = 0.0;
  std::string worst_name;
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    nn::Matrix& v = model.params().value(i);
    nn::Matrix fd(v.rows(), v.cols());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double orig = v.data()[j];
      v.data()[j] = orig + 1e-5;
      const double up = loss();
      v.data()[j] = orig - 1e-5;
      const double down = loss();
      v.data()[j] = orig;
      fd.data()[j] = (up - down) / 2e-5;
    }
    const double scale = std::max({fd.cwiseAbs().maxCoeff(), grads[i].cwiseAbs().maxCoeff(), 1e-12});
    const double rel = (fd - grads[i]).cwiseAbs().maxCoeff() / scale;
    if (rel > worst) {
      worst = rel;
      worst_name = model.params().name(i);
    }
  }
  return {worst < 1e-4, "max rel err " + fmt("%.2e", worst) + " (" + worst_name + ")"};
}

Verdict autoregressive_consistency() {
  nn::TransformerConfig cfg = tiny_config();
  cfg.d_model = 16;
  cfg.num_layers = 2;
  cfg.num_heads = 4;
  cfg.d_ff = 32;
  cfg.horizon = 20;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const nn::Transformer model(cfg, seed);
    SeededRng rng(seed, 1);
    const data::WindowSample s = random_sample(rng, cfg);
    const nn::EncoderInput in{s.past_states, s.context};
    const nn::Matrix ar = model.predict_autoregressive(in, cfg.horizon);
    const nn::Matrix one_shot = model.decoder_forward(nn::Transformer::shifted_targets(ar), model.encoder_forward(in));
    worst = std::max(worst, (ar - one_shot).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10, "max abs diff " + fmt("%.2e", worst) + " over 10 seeds"};
}

Verdict savitzky_golay_check() {
  SeededRng rng(404, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a = rng.uniform(-5.0, 5.0), b = rng.uniform(-5.0, 5.0), c = rng.uniform(-5.0, 5.0);
    const int n = 5 + static_cast<int>(rng.uniform_index(30));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = a + b * i + c * i * i;
    const Eigen::VectorXd s = mppi::savitzky_golay(y, 5, 2);
    for (int i = 2; i < n - 2; ++i) worst = std::max(worst, std::abs(s[i] - y[i]) / std::max(1.0, std::abs(y[i])));
  }
  const Eigen::VectorXd w = mppi::savitzky_golay_weights(9, 4, 5, 2);
  const double kernel[5] = {-3.0, 12.0, 17.0, 12.0, -3.0};
  double kernel_err = 0.0;
  for (int i = 0; i < 5; ++i) kernel_err = std::max(kernel_err, std::abs(w[i] - kernel[i] / 35.0));
  return {worst <= 1e-12 && kernel_err <= 1e-12,
          "max rel reproduction err " + fmt("%.2e", worst) + ", kernel err " + fmt("%.2e", kernel_err)};
}

Verdict positional_encoding_check() {
  const nn::Matrix pe = nn::positional_encoding(200, 64);
  bool row0 = true;
  for (int i = 0; i < 32; ++i) row0 = row0 && pe(0, 2 * i) == 0.0 && pe(0, 2 * i + 1) == 1.0;
  const double range = pe.cwiseAbs().maxCoeff();
  const double spot = std::abs(pe(1, 0) - std::sin(1.0));
  return {row0 && range <= 1.0 && spot <= 1e-12,
          std::string("row 0 ") + (row0 ? "exact" : "wrong") + ", max |P| " + fmt("%.6f", range) + ", |P[1][0]-sin 1| " +
              fmt("%.1e", spot)};
}

Verdict quantile_check() {
  SeededRng rng(606, 0);
  data::RowMatrix x(10000, 1);
  for (int i = 0; i < 10000; ++i) x(i, 0) = std::exp(1.5 * rng.normal());
  const data::QuantileTransform q = data::QuantileTransform::fit(x, 1000);
  const data::RowMatrix u = q.apply(x);
  const data::RowMatrix back = q.invert(u);
  const double range = x.maxCoeff() - x.minCoeff();
  const double err = (back - x).cwiseAbs().maxCoeff();
  std::vector<double> sorted(u.data(), u.data() + u.size());
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    ks = std::max({ks, std::abs((i + 1) / n - sorted[i]), std::abs(sorted[i] - i / n)});
  return {err <= range / 1000.0 && ks < 0.05, "round trip err " + fmt("%.3g", err) + " (bound " +
                                                  fmt("%.3g", range / 1000.0) + "), KS " + fmt("%.4f", ks)};
}

std::vector<harness::EpisodeMetrics> run_batch(const env::EnvironmentSpec& spec, const mppi::MppiConfig& m,
                                               harness::Controller c, const harness::TransformerPolicy* policy,
                                               std::uint64_t first_seed, int count) {
  std::vector<harness::EpisodeMetrics> out(static_cast<std::size_t>(count));
  parallel_for(out.size(), workers(), [&](std::size_t i) {
    out[i] = harness::run_episode(spec, m, c, policy, first_seed + i);
    out[i].episode = static_cast<int>(i);
  });
  return out;
}

int successes(const std::vector<harness::EpisodeMetrics>& eps) {
  return static_cast<int>(std::count_if(eps.begin(), eps.end(), [](const auto& e) {
    return e.outcome == env::Outcome::GoalReached;
  }));
}

Verdict navigation_competence() {
  const env::EnvironmentSpec spec = harness::default_env(env::EnvKind::Navigation);
  mppi::MppiConfig m = harness::default_mppi(env::EnvKind::Navigation);
  m.num_samples = 256;
  const auto eps = run_batch(spec, m, harness::Controller::Mppi, nullptr, kEvalSeed, 10);
  int ok = 0;
  for (const auto& e : eps) ok += e.outcome == env::Outcome::GoalReached && e.steps <= 150;
  return {ok >= 8, std::to_string(ok) + "/10 GoalReached (K=256, H=20, 15 obstacles)"};
}

Verdict racing_reduced() {
  const env::EnvironmentSpec spec = harness::default_env(env::EnvKind::Racing);
  const mppi::MppiConfig m = harness::default_mppi(env::EnvKind::Racing);
  const auto eps = run_batch(spec, m, harness::Controller::Mppi, nullptr, kEvalSeed, 10);
  const int ok = successes(eps);
  return {ok >= 8, std::to_string(ok) + "/10 laps completed (K=" + std::to_string(m.num_samples) + ", straight " +
                       fmt("%g", spec.racing.straight_length) + " m, radius " + fmt("%g", spec.racing.turn_radius) +
                       " m, " + std::to_string(spec.racing.num_obstacles) + " obstacles)"};
}

struct Trained {
  harness::TransformerPolicy policy;
  std::string summary;
};

Trained train_navigation_policy() {
  const env::EnvironmentSpec spec = harness::default_env(env::EnvKind::Navigation);
  data::CollectConfig cc;
  cc.env = spec;
  cc.mppi = harness::default_mppi(env::EnvKind::Navigation);
  cc.episodes = 260;
  cc.seed = kCollectSeed;
  cc.workers = workers();
  data::Dataset d = data::collect(cc);
  // Top up until at least 200 successful episodes are available.
  int extra_round = 0;
  while (d.episodes.size() < 200 && extra_round < 5) {
    data::CollectConfig more = cc;
    more.seed = hash_combine(kCollectSeed, 0x746f7075ULL + static_cast<std::uint64_t>(extra_round++));
    more.episodes = 50;
    const data::Dataset add = data::collect(more);
    d.episodes.insert(d.episodes.end(), add.episodes.begin(), add.episodes.end());
    d.stats.attempted += add.stats.attempted;
    d.stats.goal_reached += add.stats.goal_reached;
    d.stats.excluded += add.stats.excluded;
    d.stats.generation_failures += add.stats.generation_failures;
  }
  const fs::path dir = artifact_dir();
  data::save_dataset(dir / "dataset.bin", d);
  const harness::TrainingPlan plan = harness::desk_training(spec, cc.mppi.horizon);
  std::ofstream log(dir / "train_log.csv");
  log << "epoch,train_loss,val_loss\n";
  auto outcome = harness::train_policy(d, plan, kTrainSeed, [&](const nn::EpochLog& e) {
    log << e.epoch << ',' << harness::format_number(e.train_loss) << ',' << harness::format_number(e.val_loss) << '\n';
    log.flush();
    return true;
  });
  harness::save_policy(dir / "model.bin", outcome.policy);
  std::ostringstream s;
  s << d.episodes.size() << " training episodes, " << outcome.train_windows << " windows, best epoch "
    << outcome.result.best_epoch << " of " << outcome.result.log.size() << ", val loss "
    << harness::format_number(outcome.result.best_val_loss);
  return {std::move(outcome.policy), s.str()};
}

Verdict headline_comparison(const Trained& t) {
  const env::EnvironmentSpec spec = harness::default_env(env::EnvKind::Navigation);
  mppi::MppiConfig m = harness::default_mppi(env::EnvKind::Navigation);
  m.num_samples = 50;
  std::vector<double> base_costs, tf_costs;
  std::uint64_t seed = kEvalSeed;
  int tried = 0;
  const int chunk = 10;
  while (base_costs.size() < 10 && tried < 200) {
    const auto base = run_batch(spec, m, harness::Controller::Mppi, nullptr, seed, chunk);
    const auto tf = run_batch(spec, m, harness::Controller::TransformerMppi, &t.policy, seed, chunk);
    for (int i = 0; i < chunk && base_costs.size() < 10; ++i) {
      ++tried;
      if (base[i].outcome != env::Outcome::GoalReached || tf[i].outcome != env::Outcome::GoalReached) continue;
      base_costs.push_back(base[i].cost);
      tf_costs.push_back(tf[i].cost);
    }
    seed += chunk;
  }
  if (base_costs.size() < 10) return {false, "only " + std::to_string(base_costs.size()) + " paired successes"};
  const double mb = median(base_costs), mt = median(tf_costs);
  return {mt <= mb, "median cost transformer-mppi " + fmt("%.6g", mt) + " vs mppi " + fmt("%.6g", mb) +
                        " over 10 paired successes (" + std::to_string(tried) + " seeds tried, K=50; " + t.summary +
                        ")"};
}

Verdict dynamic_generalization(const Trained& t) {
  env::EnvironmentSpec spec = harness::default_env(env::EnvKind::Navigation);
  spec.nav.num_dynamic = 5;
  mppi::MppiConfig m = harness::default_mppi(env::EnvKind::Navigation);
  m.num_samples = 50;
  const int base = successes(run_batch(spec, m, harness::Controller::Mppi, nullptr, kEvalSeed, 10));
  const int tf = successes(run_batch(spec, m, harness::Controller::TransformerMppi, &t.policy, kEvalSeed, 10));
  return {tf >= base, "success transformer-mppi " + std::to_string(tf) + "/10 vs mppi " + std::to_string(base) +
                          "/10 (5 dynamic obstacles, K=50)"};
}

Verdict determinism(const Trained& t) {
  const fs::path dir = artifact_dir();
  harness::save_policy(dir / "determinism_model.bin", t.policy);
  harness::ExperimentConfig cfg;
  cfg.env = harness::default_env(env::EnvKind::Navigation);
  cfg.mppi = harness::default_mppi(env::EnvKind::Navigation);
  cfg.controllers = {harness::Controller::Mppi, harness::Controller::TransformerMppi};
  cfg.sample_counts = {50, 100};
  cfg.episodes = 4;
  cfg.dynamic_counts = {0, 5};
  cfg.seed = kEvalSeed;
  cfg.model_path = dir / "determinism_model.bin";
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  std::vector<std::string> outputs;
  for (int threads : {1, 3, 1}) {
    cfg.threads = threads;
    const fs::path out = dir / ("sweep_run" + std::to_string(outputs.size()));
    fs::remove_all(out);
    harness::run_and_write_sweep(cfg, out);
    std::string all;
    for (int n : cfg.dynamic_counts) {
      const fs::path sub = out / ("dynamic_" + std::to_string(n));
      all += read(sub / "aggregate.csv") + read(sub / "episodes.csv");
    }
    outputs.push_back(all);
  }
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2];
  return {same, std::string(same ? "identical" : "different") + " CSV bytes across reruns with 1, 3 and 1 threads (" +
                    std::to_string(outputs[0].size()) + " bytes)"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const std::string& label, const std::function<Verdict()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("%s %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", label.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report("1 weight formula oracle", weight_oracle);
  report("2 transformer gradient check", gradient_check);
  report("3 autoregressive consistency", autoregressive_consistency);
  report("4 savitzky-golay reproduction", savitzky_golay_check);
  report("5 positional encoding", positional_encoding_check);
  report("6 quantile round trip", quantile_check);
  report("7 baseline navigation competence", navigation_competence);

  std::optional<Trained> trained;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    trained = train_navigation_policy();
    std::printf("      trained navigation policy: %s [%.1f s]\n", trained->summary.c_str(),
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  } catch (const std::exception& e) {
    std::printf("      training failed: %s\n", e.what());
  }
  std::fflush(stdout);
  auto with_model = [&](Verdict (*fn)(const Trained&)) {
    return [&, fn] { return trained ? fn(*trained) : Verdict{false, "no trained model"}; };
  };
  report("8 headline comparison", with_model(headline_comparison));
  report("9 dynamic obstacle generalization", with_model(dynamic_generalization));
  report("10 sweep determinism", with_model(determinism));
  report("racing reduced preset", racing_reduced);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
