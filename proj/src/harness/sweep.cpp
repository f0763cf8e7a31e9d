#include "tmppi/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>

#include "tmppi/core/parallel.hpp"

namespace tmppi::harness {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

CellSummary summarize(Controller controller, int samples, const std::vector<EpisodeMetrics>& episodes) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  CellSummary s;
  s.controller = controller;
  s.samples = samples;
  s.episodes = static_cast<int>(episodes.size());
  std::vector<double> costs;
  double steps = 0.0;
  double ms = 0.0;
  int timed = 0;
  for (const auto& e : episodes) {
    if (!std::isnan(e.mean_step_ms)) {
      ms += e.mean_step_ms;
      ++timed;
    }
    if (e.outcome != env::Outcome::GoalReached) continue;
    costs.push_back(e.cost);
    steps += e.steps;
  }
  s.n_success = static_cast<int>(costs.size());
  s.mean_step_ms = timed > 0 ? ms / timed : nan;
  if (costs.empty()) {
    s.mean_cost = s.median_cost = s.mean_steps = nan;
    return s;
  }
  double sum = 0.0;
  for (double c : costs) sum += c;
  s.mean_cost = sum / static_cast<double>(costs.size());
  s.mean_steps = steps / static_cast<double>(costs.size());
  std::sort(costs.begin(), costs.end());
  const std::size_t mid = costs.size() / 2;
  s.median_cost = costs.size() % 2 == 1 ? costs[mid] : 0.5 * (costs[mid - 1] + costs[mid]);
  return s;
}

SweepResult run_sweep(const ExperimentConfig& cfg, int dynamic_obstacles, const TransformerPolicy* policy) {
  cfg.validate();
  env::EnvironmentSpec spec = cfg.env;
  spec.nav.num_dynamic = dynamic_obstacles;

  struct Job {
    Controller controller;
    int samples;
    int episode;
  };
  std::vector<Job> jobs;
  for (Controller c : cfg.controllers) {
    for (int k : cfg.sample_counts) {
      for (int e = 0; e < cfg.episodes; ++e) jobs.push_back({c, k, e});
    }
  }
  std::vector<EpisodeMetrics> metrics(jobs.size());
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const Job& job = jobs[i];
    mppi::MppiConfig mcfg = cfg.mppi;
    mcfg.num_samples = job.samples;
    mcfg.workers = 1;
    metrics[i] = run_episode(spec, mcfg, job.controller, policy, cfg.seed + static_cast<std::uint64_t>(job.episode),
                             cfg.timing);
    metrics[i].episode = job.episode;
  });

  SweepResult result;
  result.dynamic_obstacles = dynamic_obstacles;
  result.episodes = metrics;
  const auto per_cell = static_cast<std::size_t>(cfg.episodes);
  for (std::size_t start = 0; start < metrics.size(); start += per_cell) {
    std::vector<EpisodeMetrics> cell(metrics.begin() + static_cast<std::ptrdiff_t>(start),
                                     metrics.begin() + static_cast<std::ptrdiff_t>(start + per_cell));
    result.cells.push_back(summarize(cell.front().controller, cell.front().samples, cell));
  }
  return result;
}

void write_aggregate_csv(std::ostream& out, const SweepResult& result) {
  out << "controller,samples,n_success,mean_cost,median_cost,mean_steps,mean_step_ms\n";
  for (const auto& c : result.cells) {
    out << to_string(c.controller) << ',' << c.samples << ',' << c.n_success << ',' << format_number(c.mean_cost)
        << ',' << format_number(c.median_cost) << ',' << format_number(c.mean_steps) << ','
        << format_number(c.mean_step_ms) << '\n';
  }
}

void write_episodes_csv(std::ostream& out, const SweepResult& result) {
  out << "controller,samples,episode,seed,cost,steps,outcome\n";
  for (const auto& e : result.episodes) {
    out << to_string(e.controller) << ',' << e.samples << ',' << e.episode << ',' << e.seed << ','
        << format_number(e.cost) << ',' << e.steps << ',' << env::to_string(e.outcome) << '\n';
  }
}

std::vector<SweepResult> run_and_write_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  std::optional<TransformerPolicy> policy;
  if (std::find(cfg.controllers.begin(), cfg.controllers.end(), Controller::TransformerMppi) !=
      cfg.controllers.end()) {
    if (cfg.model_path.empty()) throw ConfigError("transformer-mppi requires model.path");
    policy = load_policy(cfg.model_path);
    policy->check_compatible(cfg.env.state_dim(), cfg.env.control_dim(), cfg.env.context_dim(), cfg.mppi.horizon);
  }
  std::vector<SweepResult> results;
  for (int dyn : cfg.dynamic_counts) {
    const auto dir = cfg.dynamic_counts.size() > 1 ? out_dir / ("dynamic_" + std::to_string(dyn)) : out_dir;
    std::filesystem::create_directories(dir);
    SweepResult r = run_sweep(cfg, dyn, policy ? &*policy : nullptr);
    std::ofstream agg(dir / "aggregate.csv", std::ios::trunc);
    std::ofstream eps(dir / "episodes.csv", std::ios::trunc);
    if (!agg || !eps) throw std::runtime_error("cannot write CSV files in '" + dir.string() + "'");
    write_aggregate_csv(agg, r);
    write_episodes_csv(eps, r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace tmppi::harness
