#include "gchr/replay/her_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gchr/errors.hpp"

namespace gchr::replay {

void Trajectory::validate() const {
  const int T = length();
  require(T >= 1, "trajectory: needs at least one action");
  require(static_cast<int>(states.size()) == T + 1, "trajectory: expected T+1 states");
  require(static_cast<int>(achieved_goals.size()) == T + 1,
          "trajectory: expected T+1 achieved goals");
  const auto sd = states.front().size();
  const auto ad = actions.front().size();
  const auto gd = desired_goal.size();
  require(sd > 0 && ad > 0 && gd > 0, "trajectory: empty vectors");
  for (const auto& s : states) require(s.size() == sd && s.allFinite(), "trajectory: bad state");
  for (const auto& a : actions) require(a.size() == ad && a.allFinite(), "trajectory: bad action");
  for (const auto& g : achieved_goals)
    require(g.size() == gd && g.allFinite(), "trajectory: bad achieved goal");
}

void Trajectory::validate(const env::GoalEnv& env) const {
  validate();
  for (std::size_t i = 0; i < states.size(); ++i)
    require(env.phi(states[i]) == achieved_goals[i],
            "trajectory: achieved goal " + std::to_string(i) + " differs from phi(state)");
}

std::string to_string(RelabelStrategy s) { return s == RelabelStrategy::Future ? "future" : "final"; }

RelabelStrategy relabel_strategy_from_string(const std::string& name) {
  if (name == "future") return RelabelStrategy::Future;
  if (name == "final") return RelabelStrategy::Final;
  throw ContractViolation("unknown relabel strategy '" + name + "'");
}

void HerConfig::validate() const {
  require(relabel_ratio >= 0.0 && relabel_ratio <= 1.0, "HerConfig: relabel_ratio must be in [0, 1]");
  require(hindsight_goal_fraction > 0.0 && hindsight_goal_fraction <= 1.0,
          "HerConfig: hindsight_goal_fraction must be in (0, 1]");
}

int SampleBatch::relabeled_count() const {
  return static_cast<int>(std::count(relabeled.begin(), relabeled.end(), char{1}));
}

RelabeledSample SampleBatch::sample(int i) const {
  require(i >= 0 && i < size(), "SampleBatch: index out of range");
  RelabeledSample s;
  s.state = states.col(i);
  s.action = actions.col(i);
  s.next_state = next_states.col(i);
  s.original_goal = original_goals.col(i);
  s.goal = goals.col(i);
  s.reward = rewards(i);
  s.is_relabeled = relabeled[i] != 0;
  s.episode_id = episode_ids[i];
  s.t = t[i];
  s.goal_step = goal_step[i];
  return s;
}

std::vector<Vector> hindsight_goal_set(const Trajectory& trajectory, double tolerance) {
  std::vector<Vector> out;
  for (const auto& g : trajectory.achieved_goals) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Vector& k) { return (k - g).norm() <= tolerance; });
    if (!seen) out.push_back(g);
  }
  return out;
}

int default_hindsight_k(double fraction, int set_size) {
  require(set_size >= 1, "default_hindsight_k: empty goal set");
  return std::max(1, static_cast<int>(std::ceil(fraction * set_size - 1e-12)));
}

std::vector<int> sample_hindsight_goal_indices(int set_size, int k, Rng& rng) {
  require(k >= 1, "sample_hindsight_goals: K must be >= 1");
  require(set_size >= 1, "sample_hindsight_goals: empty goal set");
  std::vector<int> out;
  out.reserve(k);
  if (k <= set_size) {
    // Partial Fisher-Yates.
    std::vector<int> pool(set_size);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < k; ++i) {
      std::uniform_int_distribution<int> pick(i, set_size - 1);
      std::swap(pool[i], pool[pick(rng)]);
      out.push_back(pool[i]);
    }
  } else {
    std::uniform_int_distribution<int> pick(0, set_size - 1);
    for (int i = 0; i < k; ++i) out.push_back(pick(rng));
  }
  return out;
}

std::vector<Vector> sample_hindsight_goals(const std::vector<Vector>& goal_set, int k, Rng& rng) {
  std::vector<Vector> out;
  for (int i : sample_hindsight_goal_indices(static_cast<int>(goal_set.size()), k, rng))
    out.push_back(goal_set[i]);
  return out;
}

HerBuffer::HerBuffer(std::size_t capacity, double success_tolerance,
                     env::RewardConvention convention)
    : capacity_(capacity), tolerance_(success_tolerance), convention_(convention) {
  require(capacity_ >= 1, "HerBuffer: capacity must be positive");
  require(tolerance_ > 0.0, "HerBuffer: success tolerance must be positive");
}

std::int64_t HerBuffer::store_trajectory(Trajectory trajectory) {
  trajectory.validate();
  if (!stored_.empty()) {
    const auto& ref = stored_.front().trajectory;
    require(trajectory.states.front().size() == ref.states.front().size() &&
                trajectory.actions.front().size() == ref.actions.front().size() &&
                trajectory.desired_goal.size() == ref.desired_goal.size(),
            "HerBuffer: trajectory dimensions differ from stored data");
  }
  require(static_cast<std::size_t>(trajectory.length()) <= capacity_,
          "HerBuffer: trajectory longer than buffer capacity");
  StoredTrajectory st;
  st.episode_id = next_id_++;
  st.hindsight_goals = hindsight_goal_set(trajectory, tolerance_ / 10.0);
  transitions_ += trajectory.length();
  st.trajectory = std::move(trajectory);
  stored_.push_back(std::move(st));
  while (transitions_ > capacity_) {
    transitions_ -= stored_.front().trajectory.length();
    stored_.pop_front();
  }
  rebuild_offsets();
  return stored_.back().episode_id;
}

void HerBuffer::rebuild_offsets() {
  offsets_.resize(stored_.size());
  std::size_t acc = 0;
  for (std::size_t i = 0; i < stored_.size(); ++i) {
    acc += stored_[i].trajectory.length();
    offsets_[i] = acc;
  }
}

const StoredTrajectory& HerBuffer::find(std::int64_t episode_id) const {
  require(!stored_.empty(), "HerBuffer: empty");
  const auto idx = episode_id - stored_.front().episode_id;
  require(idx >= 0 && idx < static_cast<std::int64_t>(stored_.size()),
          "HerBuffer: episode " + std::to_string(episode_id) + " not stored");
  return stored_[static_cast<std::size_t>(idx)];
}

SampleBatch HerBuffer::sample_batch(int batch_size, const HerConfig& her, Rng& rng) const {
  require(!stored_.empty(), "sample_batch: buffer is empty");
  require(batch_size >= 1, "sample_batch: batch size must be positive");
  her.validate();

  const auto& first = stored_.front().trajectory;
  const auto sd = first.states.front().size();
  const auto ad = first.actions.front().size();
  const auto gd = first.desired_goal.size();

  SampleBatch b;
  b.states.resize(sd, batch_size);
  b.actions.resize(ad, batch_size);
  b.next_states.resize(sd, batch_size);
  b.original_goals.resize(gd, batch_size);
  b.goals.resize(gd, batch_size);
  b.rewards.resize(batch_size);
  b.relabeled.assign(batch_size, 0);
  b.episode_ids.assign(batch_size, 0);
  b.t.assign(batch_size, 0);
  b.goal_step.assign(batch_size, -1);

  std::uniform_int_distribution<std::size_t> pick(0, transitions_ - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < batch_size; ++i) {
    const std::size_t flat = pick(rng);
    const auto slot = static_cast<std::size_t>(
        std::upper_bound(offsets_.begin(), offsets_.end(), flat) - offsets_.begin());
    const auto& st = stored_[slot];
    const auto& tr = st.trajectory;
    const int t = static_cast<int>(flat - (slot == 0 ? 0 : offsets_[slot - 1]));
    const int T = tr.length();

    b.states.col(i) = tr.states[t];
    b.actions.col(i) = tr.actions[t];
    b.next_states.col(i) = tr.states[t + 1];
    b.original_goals.col(i) = tr.desired_goal;
    b.episode_ids[i] = st.episode_id;
    b.t[i] = t;

    const bool relabel = her.relabel_ratio > 0.0 && coin(rng) < her.relabel_ratio;
    if (relabel) {
      int t_goal = T;
      if (her.strategy == RelabelStrategy::Future)
        t_goal = std::uniform_int_distribution<int>(t, T)(rng);
      b.goals.col(i) = tr.achieved_goals[t_goal];
      b.relabeled[i] = 1;
      b.goal_step[i] = t_goal;
    } else {
      b.goals.col(i) = tr.desired_goal;
    }
    b.rewards(i) = env::goal_reward(tr.achieved_goals[t + 1], b.goals.col(i), tolerance_, convention_);
  }
  return b;
}

namespace {

void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << v(i);
}

void write_names(std::ostream& out, const char* prefix, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i) out << ',' << prefix << i;
}

}  // namespace

void write_trajectory_csv_header(std::ostream& out, int state_dim, int action_dim, int goal_dim) {
  out << "episode,t";
  write_names(out, "s", state_dim);
  write_names(out, "a", action_dim);
  write_names(out, "ag", goal_dim);
  write_names(out, "next_ag", goal_dim);
  write_names(out, "dg", goal_dim);
  out << '\n';
}

void write_trajectory_csv_rows(std::ostream& out, std::int64_t episode_id,
                               const Trajectory& trajectory) {
  for (int t = 0; t < trajectory.length(); ++t) {
    out << episode_id << ',' << t;
    write_vector(out, trajectory.states[t]);
    write_vector(out, trajectory.actions[t]);
    write_vector(out, trajectory.achieved_goals[t]);
    write_vector(out, trajectory.achieved_goals[t + 1]);
    write_vector(out, trajectory.desired_goal);
    out << '\n';
  }
}

}  // namespace gchr::replay
