#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "tmppi/harness/experiment.hpp"

namespace tmppi::harness {

/// Aggregate over the successful episodes of one (controller, samples) cell.
struct CellSummary {
  Controller controller = Controller::Mppi;
  int samples = 0;
  int episodes = 0;
  int n_success = 0;
  double mean_cost = 0.0;    // NaN without successes
  double median_cost = 0.0;  // NaN without successes
  double mean_steps = 0.0;   // NaN without successes
  double mean_step_ms = 0.0;
  double success_rate() const { return episodes > 0 ? static_cast<double>(n_success) / episodes : 0.0; }
};

struct SweepResult {
  int dynamic_obstacles = 0;
  std::vector<CellSummary> cells;
  std::vector<EpisodeMetrics> episodes;  // ordered by cell, then episode index
};

/// Summary of one cell from its episode metrics.
CellSummary summarize(Controller controller, int samples, const std::vector<EpisodeMetrics>& episodes);

/// Runs every (controller, sample count) cell for one dynamic obstacle count.
/// Episode i uses seed cfg.seed + i in every cell.
SweepResult run_sweep(const ExperimentConfig& cfg, int dynamic_obstacles, const TransformerPolicy* policy);

/// Columns: controller,samples,n_success,mean_cost,median_cost,mean_steps,mean_step_ms.
void write_aggregate_csv(std::ostream& out, const SweepResult& result);
/// Columns: controller,samples,episode,seed,cost,steps,outcome.
void write_episodes_csv(std::ostream& out, const SweepResult& result);

/// Runs the full sweep and writes aggregate.csv and episodes.csv into `out_dir`,
/// or into `out_dir/dynamic_<n>/` when several dynamic counts are configured.
/// Loads the model when a transformer controller is requested.
std::vector<SweepResult> run_and_write_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Formats with six significant digits ("nan" for NaN).
std::string format_number(double v);

}  // namespace tmppi::harness
