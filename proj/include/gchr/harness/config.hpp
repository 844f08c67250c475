#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gchr/env/goal_env.hpp"
#include "gchr/learn/config.hpp"
#include "gchr/replay/her_buffer.hpp"

namespace gchr::harness {

struct ExperimentConfig {
  std::string env_name = "PointReach2D";
  env::EnvOverrides env;
  learn::GchrConfig agent;
  replay::HerConfig her;

  std::vector<std::uint64_t> seeds = {100, 200, 300, 400, 500};
  int epochs = 50;
  int cycles_per_epoch = 50;
  int episodes_per_cycle = 2;
  int eval_rollouts = 100;
  int warmup_steps = 5000;
  double random_action_prob = 0.3;
  double exploration_noise = 0.2;
  std::size_t buffer_capacity = replay::HerBuffer::kDefaultCapacity;
  bool dump_trajectories = false;
  bool save_checkpoints = true;
  std::filesystem::path output_dir = "default";  // relative paths resolve under output_root()

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

// Config files are INI-like:
//
//   # comment
//   [section]
//   key = value
//
// Sections: env, agent, her, run. Keys outside a section, unknown sections
// and unknown keys are errors. Every key can also be addressed as
// "section.key" by set_config_value (the CLI's --set flag).

/// Parses a config file on top of the defaults. Throws ConfigError with the
/// offending line number.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one "section.key" = value assignment.
void set_config_value(ExperimentConfig& config, const std::string& dotted_key,
                      const std::string& value);

/// All recognized "section.key" names in file order.
std::vector<std::string> config_keys();

/// Writes every key with its current value in the config-file format; the
/// output parses back to an equal configuration.
void write_config(std::ostream& out, const ExperimentConfig& config);

/// Output root from GCHR_OUTPUT_ROOT, or "runs" when unset.
std::filesystem::path output_root();
/// config.output_dir, prefixed with output_root() when relative.
std::filesystem::path resolved_output_dir(const ExperimentConfig& config);

}  // namespace gchr::harness
