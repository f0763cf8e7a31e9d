// Command-line driver: collect -> train -> run / sweep, plus inspection tools.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "tmppi/data/collect.hpp"
#include "tmppi/data/dataset.hpp"
#include "tmppi/harness/presets.hpp"
#include "tmppi/harness/sweep.hpp"
#include "tmppi/nn/model_io.hpp"

namespace fs = std::filesystem;
using namespace tmppi;

namespace {

constexpr int kUsageError = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";
  int threads = 1;
  std::vector<std::string> overrides;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

KvConfig load_config(const Globals& g) {
  KvConfig cfg;
  if (!g.config.empty()) {
    try {
      cfg = KvConfig::load(g.config);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

std::uint64_t seed_of(const Globals& g, const KvConfig& cfg) {
  if (g.seed) return *g.seed;
  return static_cast<std::uint64_t>(cfg.get_int("seed", 0));
}

fs::path ensure_out(const Globals& g) {
  fs::create_directories(g.out);
  return g.out;
}

int cmd_collect(const Globals& g, int episodes, bool include_failures, const std::string& dataset_path) {
  const KvConfig cfg = load_config(g);
  data::CollectConfig cc = harness::collect_from_config(cfg);
  cc.seed = seed_of(g, cfg);
  cc.workers = g.threads;
  if (episodes > 0) cc.episodes = episodes;
  if (include_failures) cc.include_failures = true;
  const data::Dataset d = data::collect(cc);
  const fs::path path = dataset_path.empty() ? ensure_out(g) / "dataset.bin" : fs::path(dataset_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  data::save_dataset(path, d);
  std::printf("episodes run %d, goal reached %d, kept %zu, generation failures %d\nwrote %s\n", d.stats.attempted,
              d.stats.goal_reached, d.episodes.size(), d.stats.generation_failures, path.string().c_str());
  return 0;
}

int cmd_train(const Globals& g, const std::string& dataset_path, const std::string& model_path, bool quiet) {
  const KvConfig cfg = load_config(g);
  const fs::path out = ensure_out(g);
  const data::Dataset d = data::load_dataset(dataset_path.empty() ? out / "dataset.bin" : fs::path(dataset_path));
  const env::EnvironmentSpec spec = harness::env_from_config(cfg);
  const auto plan = harness::training_from_config(cfg, spec, d.horizon);
  std::ofstream log(out / "train_log.csv", std::ios::trunc);
  log << "epoch,train_loss,val_loss\n";
  auto on_epoch = [&](const nn::EpochLog& e) {
    log << e.epoch << ',' << harness::format_number(e.train_loss) << ',' << harness::format_number(e.val_loss) << '\n';
    if (!quiet) std::fprintf(stderr, "epoch %4d  train %.6g  val %.6g\n", e.epoch, e.train_loss, e.val_loss);
    return true;
  };
  auto outcome = harness::train_policy(d, plan, seed_of(g, cfg), on_epoch);
  const fs::path path = model_path.empty() ? out / "model.bin" : fs::path(model_path);
  harness::save_policy(path, outcome.policy);
  std::printf("train windows %zu, val windows %zu, best epoch %d, best val loss %.6g\nwrote %s\n",
              outcome.train_windows, outcome.val_windows, outcome.result.best_epoch, outcome.result.best_val_loss,
              path.string().c_str());
  return 0;
}

void write_trajectory(const fs::path& path, const data::EpisodeLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  data::Dataset d;
  d.state_dim = static_cast<int>(log.states.cols());
  d.control_dim = static_cast<int>(log.controls.cols());
  d.context_dim = static_cast<int>(log.context.size());
  d.episodes.push_back(log);
  data::export_csv(out, d);
}

int cmd_run(const Globals& g, const std::string& controller, int samples, int episode, int dynamic,
            const std::string& trajectory) {
  const KvConfig cfg = load_config(g);
  harness::ExperimentConfig e = harness::experiment_from_config(cfg);
  if (samples > 0) e.mppi.num_samples = samples;
  if (dynamic >= 0) e.env.nav.num_dynamic = dynamic;
  const auto ctrl = harness::controller_from_string(controller);
  std::optional<harness::TransformerPolicy> policy;
  if (ctrl == harness::Controller::TransformerMppi) {
    if (e.model_path.empty()) throw UsageError("transformer-mppi requires model.path");
    policy = harness::load_policy(e.model_path);
  }
  const std::uint64_t seed = seed_of(g, cfg) + static_cast<std::uint64_t>(episode);
  data::EpisodeLog log;
  const auto m = harness::run_episode(e.env, e.mppi, ctrl, policy ? &*policy : nullptr, seed, e.timing, &log);
  if (!trajectory.empty()) write_trajectory(trajectory, log);
  std::printf("controller %s\nsamples %d\nseed %llu\noutcome %s\nsteps %d\ncost %s\nmean_step_ms %s\n",
              harness::to_string(ctrl).c_str(), m.samples, static_cast<unsigned long long>(seed),
              env::to_string(m.outcome).c_str(), m.steps, harness::format_number(m.cost).c_str(),
              harness::format_number(m.mean_step_ms).c_str());
  return m.outcome == env::Outcome::GoalReached ? 0 : 3;
}

int cmd_sweep(const Globals& g, bool timing) {
  const KvConfig cfg = load_config(g);
  harness::ExperimentConfig e = harness::experiment_from_config(cfg);
  e.seed = seed_of(g, cfg);
  e.threads = g.threads;
  if (timing) e.timing = true;
  const auto results = harness::run_and_write_sweep(e, ensure_out(g));
  for (const auto& r : results) {
    std::printf("dynamic obstacles %d\n", r.dynamic_obstacles);
    harness::write_aggregate_csv(std::cout, r);
  }
  return 0;
}

int cmd_model_inspect(const std::string& path) {
  std::fputs(nn::inspect_model(nn::load_model(path)).c_str(), stdout);
  return 0;
}

int cmd_dataset_export(const std::string& path, const std::string& csv) {
  const data::Dataset d = data::load_dataset(path);
  if (csv.empty() || csv == "-") {
    data::export_csv(std::cout, d);
    return 0;
  }
  std::ofstream out(csv, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + csv + "'");
  data::export_csv(out, d);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPPI with transformer-initialized mean sequences", "tmppi"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Base seed (default: config key 'seed' or 0)");
  app.add_option("--config", g.config, "key = value configuration file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--set", g.overrides, "Override a config entry: key=value (repeatable)");

  int episodes = 0;
  bool include_failures = false;
  std::string dataset_path;
  auto* collect = app.add_subcommand("collect", "Run baseline MPPI on random static worlds and save a dataset");
  collect->add_option("--episodes", episodes, "Number of worlds (default: collect.episodes)");
  collect->add_flag("--include-failures", include_failures, "Keep episodes that did not reach the goal");
  collect->add_option("--dataset", dataset_path, "Dataset file (default: <out>/dataset.bin)");

  std::string model_path;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "Train the transformer on a dataset");
  train->add_option("--dataset", dataset_path, "Dataset file (default: <out>/dataset.bin)");
  train->add_option("--model", model_path, "Model file to write (default: <out>/model.bin)");
  train->add_flag("--quiet", quiet, "Do not print per-epoch losses");

  std::string controller = "mppi";
  int samples = 0;
  int episode = 0;
  int dynamic = -1;
  auto* run = app.add_subcommand("run", "Run one closed-loop episode");
  run->add_option("--controller", controller, "mppi or transformer-mppi")->capture_default_str();
  run->add_option("--samples", samples, "Number of MPPI samples (default: mppi.samples)");
  run->add_option("--episode", episode, "Episode index; the world seed is seed + index")->capture_default_str();
  run->add_option("--dynamic", dynamic, "Number of dynamic obstacles (navigation)");
  std::string trajectory;
  run->add_option("--trajectory", trajectory, "Write the executed trajectory as CSV");

  bool timing = false;
  auto* sweep = app.add_subcommand("sweep", "Sweep controllers and sample counts; writes aggregate.csv and episodes.csv");
  sweep->add_flag("--timing", timing, "Record per-step wall time in mean_step_ms");

  std::string file_arg;
  auto* model = app.add_subcommand("model", "Model file tools");
  model->require_subcommand(1);
  auto* inspect = model->add_subcommand("inspect", "Print config, tensor shapes and norms");
  inspect->add_option("file", file_arg, "Model file")->required();

  std::string csv_path;
  auto* dataset = app.add_subcommand("dataset", "Dataset file tools");
  dataset->require_subcommand(1);
  auto* dexport = dataset->add_subcommand("export", "Write one CSV row per step");
  dexport->add_option("file", file_arg, "Dataset file")->required();
  dexport->add_option("--csv", csv_path, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kUsageError;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    if (*collect) return cmd_collect(g, episodes, include_failures, dataset_path);
    if (*train) return cmd_train(g, dataset_path, model_path, quiet);
    if (*run) return cmd_run(g, controller, samples, episode, dynamic, trajectory);
    if (*sweep) return cmd_sweep(g, timing);
    if (*inspect) return cmd_model_inspect(file_arg);
    if (*dexport) return cmd_dataset_export(file_arg, csv_path);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kUsageError;
}
