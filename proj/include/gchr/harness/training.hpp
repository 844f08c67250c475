#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gchr/env/goal_env.hpp"
#include "gchr/harness/config.hpp"
#include "gchr/nn/mlp.hpp"

namespace gchr::harness {

/// One row of metrics.csv.
struct EpochRow {
  int epoch = 0;
  std::uint64_t seed = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double hsr_loss = 0.0;
  double hgr_loss = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "epoch,seed,success_rate,mean_return,critic_loss,actor_loss,hsr_loss,hgr_loss";

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const EpochRow& row);
std::vector<EpochRow> read_metrics_csv(const std::filesystem::path& path);

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<EpochRow> rows;
  bool failed = false;
  std::string error;
  std::filesystem::path dir;
  double final_success() const { return rows.empty() ? 0.0 : rows.back().success_rate; }
};

struct RunResult {
  std::vector<SeedResult> seeds;
  std::filesystem::path dir;
  bool any_failed() const;
};

/// Called after every finished epoch; used for progress output.
using EpochCallback = std::function<void(const EpochRow&)>;

/// Trains one seed into `dir`: metrics.csv, timing.csv, actor.ckpt,
/// critic.ckpt and, when enabled, trajectories.csv. A non-finite loss stops
/// the run, saves the last completed epoch's networks and marks it failed.
SeedResult run_training_seed(const ExperimentConfig& config, std::uint64_t seed,
                             const std::filesystem::path& dir, const EpochCallback& on_epoch = {});

/// All seeds of the config under resolved_output_dir(config): one seed_<n>
/// directory each, plus the aggregate metrics.csv and the resolved config.
RunResult run_training(const ExperimentConfig& config, const EpochCallback& on_epoch = {});

struct EvalResult {
  double success_rate = 0.0;
  double mean_return = 0.0;
};

/// Deterministic controller: action from (state, desired goal).
using Controller = std::function<nn::Vector(const nn::Vector& state, const nn::Vector& goal)>;

/// n episodes with fresh goals; success is the goal indicator at the final
/// state. Rejects n < 1.
EvalResult run_eval(const Controller& controller, const env::GoalEnv& env, int n,
                    std::uint64_t seed);
/// Mean-action rollouts of an actor network.
EvalResult run_eval(const nn::Mlp& actor, const env::GoalEnv& env, int n, std::uint64_t seed,
                    bool squash = true);

/// Proportional position controller for PointReach2D.
Controller point_reach_controller(double gain = 3.0, double damping = 1.0);

enum class SweepAxis { Beta, Alpha, KFraction, RelabelRatio, ActionNoise };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// Sets the field a sweep axis controls.
void apply_sweep_value(ExperimentConfig& config, SweepAxis axis, double value);

struct SweepRow {
  SweepAxis axis = SweepAxis::Beta;
  double value = 0.0;
  double mean = 0.0;  // final-epoch success over the seeds that finished
  double sd = 0.0;    // sample standard deviation, 0 for a single seed
  int n_seeds = 0;
  int failed = 0;
};

inline constexpr const char* kSweepHeader = "axis,value,mean,sd,n_seeds,failed";

/// Summary statistics of final success over seeds.
SweepRow summarize_sweep_cell(SweepAxis axis, double value, const RunResult& run);

/// One multi-seed run per value under <output>/<axis>_<value>, then
/// summary.csv. Failed cells are recorded and the sweep continues. The
/// action-noise axis always includes 0.
std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                std::vector<double> values, const EpochCallback& on_epoch = {});

/// Reads <seed dir>/trajectories.csv and writes terminal_goals.csv with one
/// row per episode: episode,ag0,... Returns the number of episodes.
/// Throws ContractViolation when the dump is missing.
int dump_terminal_goals(const std::filesystem::path& seed_dir);

}  // namespace gchr::harness
