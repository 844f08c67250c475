#include "gchr/harness/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "gchr/errors.hpp"
#include "gchr/learn/agent.hpp"
#include "gchr/nn/checkpoint.hpp"

namespace gchr::harness {

namespace fs = std::filesystem;
using nn::Vector;
using Rng = std::mt19937_64;

void write_metrics_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_metrics_row(std::ostream& out, const EpochRow& r) {
  std::ostringstream ss;
  ss << std::setprecision(12);
  ss << r.epoch << ',' << r.seed << ',' << r.success_rate << ',' << r.mean_return << ','
     << r.critic_loss << ',' << r.actor_loss << ',' << r.hsr_loss << ',' << r.hgr_loss << '\n';
  out << ss.str();
}

std::vector<EpochRow> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "read_metrics_csv: cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  require(line == kMetricsHeader, "read_metrics_csv: unexpected header in " + path.string());
  std::vector<EpochRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[8];
    for (auto& field : f) std::getline(ss, field, ',');
    EpochRow r;
    r.epoch = std::stoi(f[0]);
    r.seed = std::stoull(f[1]);
    r.success_rate = std::stod(f[2]);
    r.mean_return = std::stod(f[3]);
    r.critic_loss = std::stod(f[4]);
    r.actor_loss = std::stod(f[5]);
    r.hsr_loss = std::stod(f[6]);
    r.hgr_loss = std::stod(f[7]);
    rows.push_back(r);
  }
  return rows;
}

bool RunResult::any_failed() const {
  return std::ranges::any_of(seeds, [](const SeedResult& s) { return s.failed; });
}

// Evaluation -----------------------------------------------------------------

EvalResult run_eval(const Controller& controller, const env::GoalEnv& env, int n,
                    std::uint64_t seed) {
  require(n >= 1, "run_eval: need at least one rollout");
  Rng rng(seed);
  double successes = 0.0, returns = 0.0;
  for (int i = 0; i < n; ++i) {
    auto st = env.reset(rng);
    bool success = false;
    for (int t = 0; t < env.spec().horizon; ++t) {
      const Vector a = controller(st.state, st.desired_goal).cwiseMax(-1.0).cwiseMin(1.0);
      auto res = env.step(st, a, rng);
      returns += res.reward;
      success = res.success;
      st = std::move(res.next);
    }
    successes += success ? 1.0 : 0.0;
  }
  return {successes / n, returns / n};
}

EvalResult run_eval(const nn::Mlp& actor, const env::GoalEnv& env, int n, std::uint64_t seed,
                    bool squash) {
  return run_eval(
      [&](const Vector& s, const Vector& g) { return learn::policy_mean_action(actor, s, g, squash); },
      env, n, seed);
}

Controller point_reach_controller(double gain, double damping) {
  return [gain, damping](const Vector& s, const Vector& g) -> Vector {
    return gain * (g - s.head(2)) - damping * s.tail(2);
  };
}

// Training -------------------------------------------------------------------

namespace {

struct LossAccumulator {
  double critic = 0.0, actor = 0.0, hsr = 0.0, hgr = 0.0;
  int count = 0;

  void add(const learn::UpdateStats& s) {
    for (double v : {s.critic_loss, s.actor_loss, s.hsr, s.hgr})
      if (!std::isfinite(v)) throw NumericError("non-finite loss at update " + std::to_string(count));
    critic += s.critic_loss;
    actor += s.actor_loss;
    hsr += s.hsr;
    hgr += s.hgr;
    ++count;
  }
  double mean(double total) const { return count ? total / count : 0.0; }
};

std::uint64_t eval_seed(std::uint64_t seed, int epoch) {
  return seed * 1'000'003ULL + static_cast<std::uint64_t>(epoch);
}

class Trainer {
 public:
  Trainer(const ExperimentConfig& config, std::uint64_t seed)
      : config_(config),
        env_(env::make_env(config.env_name, config.env)),
        rng_(seed),
        agent_(env_->spec().state_dim, env_->spec().goal_dim, env_->spec().action_dim,
               config.agent, config.her, env_->spec().reward_convention, seed),
        buffer_(config.buffer_capacity, env_->spec().success_tolerance,
                env_->spec().reward_convention) {}

  const env::GoalEnv& env() const { return *env_; }
  learn::GchrAgent& agent() { return agent_; }

  void set_dump(std::ostream* out) {
    dump_ = out;
    if (dump_) {
      const auto& spec = env_->spec();
      replay::write_trajectory_csv_header(*dump_, spec.state_dim, spec.action_dim, spec.goal_dim);
    }
  }

  // Returns the number of environment steps taken.
  int collect_episode(bool random_only) {
    const auto& spec = env_->spec();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, config_.exploration_noise);

    auto st = env_->reset(rng_);
    replay::Trajectory tr;
    tr.desired_goal = st.desired_goal;
    tr.states.push_back(st.state);
    tr.achieved_goals.push_back(st.achieved_goal);
    for (int t = 0; t < spec.horizon; ++t) {
      Vector a(spec.action_dim);
      if (random_only || unit(rng_) < config_.random_action_prob) {
        for (int d = 0; d < spec.action_dim; ++d) a(d) = box(rng_);
      } else {
        a = agent_.act(st.state, st.desired_goal, false, rng_);
        for (int d = 0; d < spec.action_dim; ++d) a(d) = std::clamp(a(d) + noise(rng_), -1.0, 1.0);
      }
      auto res = env_->step(st, a, rng_);
      tr.actions.push_back(a);
      tr.states.push_back(res.next.state);
      tr.achieved_goals.push_back(res.next.achieved_goal);
      st = std::move(res.next);
    }
    const auto id = buffer_.store_trajectory(tr);
    if (dump_) replay::write_trajectory_csv_rows(*dump_, id, tr);
    return spec.horizon;
  }

  void update(LossAccumulator& acc) {
    for (int i = 0; i < config_.agent.updates_per_cycle; ++i) acc.add(agent_.update(buffer_, rng_));
  }

 private:
  const ExperimentConfig& config_;
  std::unique_ptr<env::GoalEnv> env_;
  Rng rng_;
  learn::GchrAgent agent_;
  replay::HerBuffer buffer_;
  std::ostream* dump_ = nullptr;
};

std::string format_value(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

SeedResult run_training_seed(const ExperimentConfig& config, std::uint64_t seed, const fs::path& dir,
                             const EpochCallback& on_epoch) {
  config.validate();
  fs::create_directories(dir);
  SeedResult result;
  result.seed = seed;
  result.dir = dir;

  Trainer trainer(config, seed);
  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  std::ofstream timing(dir / "timing.csv", std::ios::binary);
  if (!metrics || !timing) throw std::runtime_error("cannot write into " + dir.string());
  write_metrics_header(metrics);
  timing << "epoch,seed,wall_seconds\n";
  std::ofstream dump;
  if (config.dump_trajectories) {
    dump.open(dir / "trajectories.csv", std::ios::binary);
    trainer.set_dump(&dump);
  }

  nn::Mlp good_actor = trainer.agent().nets().actor;
  nn::Mlp good_critic = trainer.agent().nets().critic;
  auto save = [&](const nn::Mlp& actor, const nn::Mlp& critic) {
    if (!config.save_checkpoints) return;
    nn::save_mlp(dir / "actor.ckpt", actor);
    nn::save_mlp(dir / "critic.ckpt", critic);
  };

  try {
    for (int steps = 0; steps < config.warmup_steps;) steps += trainer.collect_episode(true);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
      const auto start = std::chrono::steady_clock::now();
      LossAccumulator acc;
      for (int cycle = 0; cycle < config.cycles_per_epoch; ++cycle) {
        for (int e = 0; e < config.episodes_per_cycle; ++e) trainer.collect_episode(false);
        trainer.update(acc);
      }
      const auto eval = run_eval(trainer.agent().nets().actor, trainer.env(), config.eval_rollouts,
                                 eval_seed(seed, epoch), config.agent.squash);
      EpochRow row{epoch,          seed,
                   eval.success_rate, eval.mean_return,
                   acc.mean(acc.critic), acc.mean(acc.actor),
                   acc.mean(acc.hsr), acc.mean(acc.hgr)};
      write_metrics_row(metrics, row);
      metrics.flush();
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      timing << epoch << ',' << seed << ',' << secs << '\n';
      result.rows.push_back(row);
      good_actor = trainer.agent().nets().actor;
      good_critic = trainer.agent().nets().critic;
      if (on_epoch) on_epoch(row);
    }
  } catch (const NumericError& e) {
    result.failed = true;
    result.error = e.what();
  }
  save(good_actor, good_critic);
  return result;
}

RunResult run_training(const ExperimentConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  RunResult run;
  run.dir = resolved_output_dir(config);
  fs::create_directories(run.dir);
  {
    std::ofstream cfg(run.dir / "config.ini", std::ios::binary);
    write_config(cfg, config);
  }
  for (auto seed : config.seeds)
    run.seeds.push_back(
        run_training_seed(config, seed, run.dir / ("seed_" + std::to_string(seed)), on_epoch));

  std::ofstream all(run.dir / "metrics.csv", std::ios::binary);
  write_metrics_header(all);
  for (const auto& s : run.seeds)
    for (const auto& row : s.rows) write_metrics_row(all, row);
  return run;
}

// Sweeps ---------------------------------------------------------------------

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Beta: return "beta";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::KFraction: return "k_fraction";
    case SweepAxis::RelabelRatio: return "relabel_ratio";
    case SweepAxis::ActionNoise: return "action_noise";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (auto axis : {SweepAxis::Beta, SweepAxis::Alpha, SweepAxis::KFraction,
                    SweepAxis::RelabelRatio, SweepAxis::ActionNoise})
    if (to_string(axis) == name) return axis;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

void apply_sweep_value(ExperimentConfig& config, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::Beta: config.agent.beta = value; break;
    case SweepAxis::Alpha: config.agent.alpha = value; break;
    case SweepAxis::KFraction:
      config.her.hindsight_goal_fraction = value;
      config.agent.hindsight_k = 0;
      break;
    case SweepAxis::RelabelRatio: config.her.relabel_ratio = value; break;
    case SweepAxis::ActionNoise: config.env.action_noise_std = value; break;
  }
}

SweepRow summarize_sweep_cell(SweepAxis axis, double value, const RunResult& run) {
  SweepRow row;
  row.axis = axis;
  row.value = value;
  std::vector<double> finals;
  for (const auto& s : run.seeds) {
    if (s.failed || s.rows.empty())
      ++row.failed;
    else
      finals.push_back(s.final_success());
  }
  row.n_seeds = static_cast<int>(finals.size());
  if (finals.empty()) return row;
  for (double f : finals) row.mean += f;
  row.mean /= finals.size();
  if (finals.size() > 1) {
    double ss = 0.0;
    for (double f : finals) ss += (f - row.mean) * (f - row.mean);
    row.sd = std::sqrt(ss / (finals.size() - 1));
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& base, SweepAxis axis,
                                std::vector<double> values, const EpochCallback& on_epoch) {
  require(!values.empty(), "run_sweep: no values");
  if (axis == SweepAxis::ActionNoise && std::ranges::find(values, 0.0) == values.end())
    values.insert(values.begin(), 0.0);

  const fs::path root = resolved_output_dir(base);
  fs::create_directories(root);
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig cell = base;
    apply_sweep_value(cell, axis, v);
    cell.output_dir = root / (to_string(axis) + "_" + format_value(v));
    RunResult run;
    try {
      run = run_training(cell, on_epoch);
    } catch (const std::exception& e) {
      run.seeds.assign(cell.seeds.size(), SeedResult{});
      for (auto& s : run.seeds) {
        s.failed = true;
        s.error = e.what();
      }
    }
    rows.push_back(summarize_sweep_cell(axis, v, run));
  }
  std::ofstream out(root / "summary.csv", std::ios::binary);
  out << kSweepHeader << '\n' << std::setprecision(12);
  for (const auto& r : rows)
    out << to_string(r.axis) << ',' << r.value << ',' << r.mean << ',' << r.sd << ',' << r.n_seeds
        << ',' << r.failed << '\n';
  return rows;
}

// Terminal goals ---------------------------------------------------------------

int dump_terminal_goals(const fs::path& seed_dir) {
  const fs::path src = seed_dir / "trajectories.csv";
  std::ifstream in(src);
  require(static_cast<bool>(in), "dump_terminal_goals: no trajectory dump at " + src.string() +
                                     " (enable run.dump_trajectories)");
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  std::vector<int> goal_cols;
  for (int i = 0; i < static_cast<int>(header.size()); ++i)
    if (header[i].rfind("next_ag", 0) == 0) goal_cols.push_back(i);
  require(!goal_cols.empty() && header.size() >= 2 && header[0] == "episode",
          "dump_terminal_goals: malformed header in " + src.string());

  std::vector<std::string> order;
  std::map<std::string, std::pair<int, std::vector<std::string>>> last;  // episode -> (t, goal)
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    require(f.size() == header.size(), "dump_terminal_goals: ragged row in " + src.string());
    const int t = std::stoi(f[1]);
    auto [it, inserted] = last.try_emplace(f[0], -1, std::vector<std::string>{});
    if (inserted) order.push_back(f[0]);
    if (t > it->second.first) {
      it->second.first = t;
      it->second.second.clear();
      for (int c : goal_cols) it->second.second.push_back(f[c]);
    }
  }
  std::ofstream out(seed_dir / "terminal_goals.csv", std::ios::binary);
  out << "episode";
  for (std::size_t i = 0; i < goal_cols.size(); ++i) out << ",ag" << i;
  out << '\n';
  for (const auto& ep : order) {
    out << ep;
    for (const auto& v : last[ep].second) out << ',' << v;
    out << '\n';
  }
  return static_cast<int>(order.size());
}

}  // namespace gchr::harness
