#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "gchr/env/goal_env.hpp"
#include "gchr/nn/mlp.hpp"

namespace gchr::replay {

using nn::Matrix;
using nn::Vector;
using Rng = std::mt19937_64;

/// One episode: T+1 states, T actions, achieved goals phi(s_0..s_T).
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> actions;
  std::vector<Vector> achieved_goals;
  Vector desired_goal;

  int length() const { return static_cast<int>(actions.size()); }
  /// Shape checks; throws ContractViolation.
  void validate() const;
  /// Shape checks plus achieved_goals[i] == env.phi(states[i]).
  void validate(const env::GoalEnv& env) const;
};

enum class RelabelStrategy { Future, Final };

std::string to_string(RelabelStrategy s);
RelabelStrategy relabel_strategy_from_string(const std::string& name);

struct HerConfig {
  RelabelStrategy strategy = RelabelStrategy::Future;
  double relabel_ratio = 0.8;
  double hindsight_goal_fraction = 1.0;

  void validate() const;
};

struct RelabeledSample {
  Vector state;
  Vector action;
  Vector next_state;
  Vector original_goal;
  Vector goal;  // effective goal: relabeled when is_relabeled, else original
  double reward = 0.0;
  bool is_relabeled = false;
  std::int64_t episode_id = 0;
  int t = 0;
  int goal_step = -1;  // t' whose achieved goal was used, -1 if not relabeled
};

/// Column-major minibatch: column i of every matrix belongs to sample i.
struct SampleBatch {
  Matrix states;
  Matrix actions;
  Matrix next_states;
  Matrix original_goals;
  Matrix goals;
  Vector rewards;
  std::vector<char> relabeled;
  std::vector<std::int64_t> episode_ids;
  std::vector<int> t;
  std::vector<int> goal_step;

  int size() const { return static_cast<int>(rewards.size()); }
  int relabeled_count() const;
  RelabeledSample sample(int i) const;
};

/// Achieved goals of every timestep, deduplicated within `tolerance`
/// (Euclidean), in first-visit order.
std::vector<Vector> hindsight_goal_set(const Trajectory& trajectory, double tolerance);

/// ceil(fraction * set_size), at least 1.
int default_hindsight_k(double fraction, int set_size);

/// K indices into a goal set of the given size: uniform without replacement
/// when K <= set_size, with replacement otherwise.
std::vector<int> sample_hindsight_goal_indices(int set_size, int k, Rng& rng);
std::vector<Vector> sample_hindsight_goals(const std::vector<Vector>& goal_set, int k, Rng& rng);

struct StoredTrajectory {
  std::int64_t episode_id = 0;
  Trajectory trajectory;
  std::vector<Vector> hindsight_goals;
};

/// FIFO trajectory store with hindsight relabeling. Capacity counts
/// transitions; the oldest trajectories are evicted once it is exceeded.
class HerBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 1'000'000;

  HerBuffer(std::size_t capacity, double success_tolerance, env::RewardConvention convention);

  /// Returns the episode id assigned to the trajectory.
  std::int64_t store_trajectory(Trajectory trajectory);

  /// Transitions drawn uniformly over everything stored, each relabeled
  /// independently with probability her.relabel_ratio. Rewards are the
  /// indicator at s_{t+1} under the effective goal.
  SampleBatch sample_batch(int batch_size, const HerConfig& her, Rng& rng) const;

  std::size_t transition_count() const { return transitions_; }
  std::size_t trajectory_count() const { return stored_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return stored_.empty(); }
  double success_tolerance() const { return tolerance_; }
  env::RewardConvention reward_convention() const { return convention_; }

  const StoredTrajectory& find(std::int64_t episode_id) const;
  const std::deque<StoredTrajectory>& trajectories() const { return stored_; }

 private:
  void rebuild_offsets();

  std::size_t capacity_;
  double tolerance_;
  env::RewardConvention convention_;
  std::deque<StoredTrajectory> stored_;
  std::vector<std::size_t> offsets_;  // cumulative transition counts
  std::size_t transitions_ = 0;
  std::int64_t next_id_ = 0;
};

// Trajectory CSV: one row per transition with columns
//   episode,t,s0..,a0..,ag0..,next_ag0..,dg0..
void write_trajectory_csv_header(std::ostream& out, int state_dim, int action_dim, int goal_dim);
void write_trajectory_csv_rows(std::ostream& out, std::int64_t episode_id,
                               const Trajectory& trajectory);

}  // namespace gchr::replay
