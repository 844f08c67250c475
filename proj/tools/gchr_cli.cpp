// gchr command line: train, eval, sweep, tabular-verify, dump-goals.
// Exit codes: 0 success, 1 run failure, 2 configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gchr/env/goal_env.hpp"
#include "gchr/env/tabular_mdp.hpp"
#include "gchr/errors.hpp"
#include "gchr/harness/config.hpp"
#include "gchr/harness/training.hpp"
#include "gchr/nn/checkpoint.hpp"
#include "gchr/tabular/verify.hpp"

namespace fs = std::filesystem;
using namespace gchr;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string output;
  std::string seeds;
  int epochs = 0;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.sets, "override a key: section.key=value (repeatable)");
  cmd->add_option("-o,--output", o.output, "output directory (run.output_dir)");
  cmd->add_option("--seeds", o.seeds, "comma-separated seeds (run.seeds)");
  cmd->add_option("--epochs", o.epochs, "run.epochs");
  cmd->add_flag("-q,--quiet", o.quiet, "no per-epoch progress");
}

harness::ExperimentConfig build_config(const CommonOptions& o) {
  harness::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = harness::load_config(o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + s + "'");
    harness::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.output.empty()) cfg.output_dir = o.output;
  if (!o.seeds.empty()) harness::set_config_value(cfg, "run.seeds", o.seeds);
  if (o.epochs > 0) cfg.epochs = o.epochs;
  cfg.validate();
  return cfg;
}

harness::EpochCallback progress(bool quiet) {
  if (quiet) return {};
  return [](const harness::EpochRow& r) {
    std::cerr << "seed " << r.seed << " epoch " << r.epoch << " success " << r.success_rate
              << " critic " << r.critic_loss << "\n";
  };
}

int report_run(const harness::RunResult& run) {
  for (const auto& s : run.seeds) {
    std::cout << "seed " << s.seed << ": final success " << s.final_success();
    if (s.failed) std::cout << " FAILED (" << s.error << ")";
    std::cout << "\n";
  }
  std::cout << "metrics: " << (run.dir / "metrics.csv").string() << "\n";
  return run.any_failed() ? kRunFailure : kOk;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad sweep value '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--values must list at least one value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-conditioned actor-critic with hindsight regularizers"};
  app.require_subcommand(1);

  CommonOptions train_opts;
  auto* train = app.add_subcommand("train", "train every seed of a config");
  add_common(train, train_opts);

  CommonOptions eval_opts;
  std::string checkpoint;
  int rollouts = 100;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval", "evaluate a saved actor with mean actions");
  add_common(eval, eval_opts);
  eval->add_option("--checkpoint", checkpoint, "actor checkpoint")->required();
  eval->add_option("-n,--rollouts", rollouts, "episodes");
  eval->add_option("--eval-seed", eval_seed, "rng seed for goals and noise");

  CommonOptions sweep_opts;
  std::string axis, values;
  auto* sweep = app.add_subcommand("sweep", "one multi-seed run per value of an axis");
  add_common(sweep, sweep_opts);
  sweep->add_option("--axis", axis, "beta, alpha, k_fraction, relabel_ratio or action_noise")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  std::string mdp_path, verify_out;
  tabular::VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("tabular-verify", "exact checks on a tabular goal-conditioned MDP");
  verify->add_option("mdp", mdp_path, "MDP spec file")->required()->check(CLI::ExistingFile);
  verify->add_option("-o,--output", verify_out, "directory for report.txt and margins.csv");
  verify->add_option("--iterations", verify_opts.policy_iterations, "policy-iteration sweeps");
  verify->add_option("--delta", verify_opts.delta, "uniform-reachability tolerance");
  verify->add_option("--log-episodes", verify_opts.log_episodes, "random episodes for the coverage check");
  verify->add_option("--log-horizon", verify_opts.log_horizon, "length of those episodes");
  verify->add_option("--seed", verify_opts.seed, "rng seed for the coverage log");

  std::string run_dir;
  auto* dump = app.add_subcommand("dump-goals", "terminal achieved goal of every training episode");
  dump->add_option("run", run_dir, "run directory or seed directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*train) {
      const auto cfg = build_config(train_opts);
      return report_run(harness::run_training(cfg, progress(train_opts.quiet)));
    }
    if (*eval) {
      const auto cfg = build_config(eval_opts);
      const auto actor = nn::load_mlp(checkpoint);
      const auto env = env::make_env(cfg.env_name, cfg.env);
      const auto res = harness::run_eval(actor, *env, rollouts, eval_seed, cfg.agent.squash);
      std::cout << "success_rate " << res.success_rate << "\nmean_return " << res.mean_return << "\n";
      return kOk;
    }
    if (*sweep) {
      const auto cfg = build_config(sweep_opts);
      const auto rows = harness::run_sweep(cfg, harness::sweep_axis_from_string(axis),
                                           parse_values(values), progress(sweep_opts.quiet));
      bool failed = false;
      std::cout << harness::kSweepHeader << "\n";
      for (const auto& r : rows) {
        std::cout << harness::to_string(r.axis) << ',' << r.value << ',' << r.mean << ',' << r.sd
                  << ',' << r.n_seeds << ',' << r.failed << "\n";
        failed = failed || r.failed > 0;
      }
      return failed ? kRunFailure : kOk;
    }
    if (*verify) {
      const auto mdp = env::load_tabular_gcmdp(mdp_path);
      const auto report = tabular::verify_tabular_mdp(mdp, verify_opts);
      tabular::write_verify_text(std::cout, mdp, report);
      if (!verify_out.empty()) {
        fs::create_directories(verify_out);
        std::ofstream txt(fs::path(verify_out) / "report.txt");
        tabular::write_verify_text(txt, mdp, report);
        std::ofstream csv(fs::path(verify_out) / "margins.csv");
        tabular::write_verify_csv(csv, report);
      }
      return report.all_pass() ? kOk : kRunFailure;
    }
    if (*dump) {
      std::vector<fs::path> dirs;
      if (fs::exists(fs::path(run_dir) / "trajectories.csv")) dirs.emplace_back(run_dir);
      for (const auto& entry : fs::directory_iterator(run_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "trajectories.csv"))
          dirs.push_back(entry.path());
      if (dirs.empty()) {
        std::cerr << "dump-goals: no trajectories.csv under " << run_dir
                  << " (train with run.dump_trajectories = true)\n";
        return kRunFailure;
      }
      std::sort(dirs.begin(), dirs.end());
      for (const auto& d : dirs) {
        const int n = harness::dump_terminal_goals(d);
        std::cout << (d / "terminal_goals.csv").string() << ": " << n << " episodes\n";
      }
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunFailure;
  }
  return kOk;
}
