#include "gchr/env/goal_env.hpp"

#include <algorithm>

#include "gchr/env/tasks.hpp"
#include "gchr/errors.hpp"

namespace gchr::env {

std::string to_string(RewardConvention c) {
  return c == RewardConvention::ZeroOne ? "ZeroOne" : "NegOneZero";
}

RewardConvention reward_convention_from_string(const std::string& name) {
  if (name == "ZeroOne") return RewardConvention::ZeroOne;
  if (name == "NegOneZero") return RewardConvention::NegOneZero;
  throw ContractViolation("unknown reward convention '" + name + "'");
}

void GoalEnvSpec::validate() const {
  require(state_dim > 0 && action_dim > 0 && goal_dim > 0, "GoalEnvSpec: dimensions must be positive");
  require(horizon >= 1, "GoalEnvSpec: horizon must be >= 1");
  require(success_tolerance > 0.0, "GoalEnvSpec: success tolerance must be positive");
  require(action_noise_std >= 0.0, "GoalEnvSpec: action noise must be non-negative");
}

bool goal_reached(const Vector& achieved, const Vector& desired, double tolerance) {
  require(achieved.size() == desired.size(), "goal_reached: goal dimension mismatch");
  return (achieved - desired).norm() <= tolerance;
}

double goal_reward(const Vector& achieved, const Vector& desired, double tolerance,
                   RewardConvention convention) {
  const double hit = goal_reached(achieved, desired, tolerance) ? 1.0 : 0.0;
  return convention == RewardConvention::ZeroOne ? hit : hit - 1.0;
}

GoalEnv::GoalEnv(GoalEnvSpec spec) : spec_(spec) { spec_.validate(); }

GoalEnvState GoalEnv::make_state(Vector state, Vector desired_goal, int step_index) const {
  require(state.size() == spec_.state_dim, "make_state: state dimension mismatch");
  require(desired_goal.size() == spec_.goal_dim, "make_state: goal dimension mismatch");
  GoalEnvState s;
  s.achieved_goal = phi(state);
  s.state = std::move(state);
  s.desired_goal = std::move(desired_goal);
  s.step_index = step_index;
  return s;
}

GoalEnvState GoalEnv::reset(Rng& rng) const {
  Vector start = sample_start(rng);
  Vector goal = sample_goal(rng);
  return make_state(std::move(start), std::move(goal), 0);
}

StepResult GoalEnv::step(const GoalEnvState& current, const Vector& action, Rng& rng) const {
  require(current.step_index < spec_.horizon,
          "env_step: episode already finished at step " + std::to_string(current.step_index));
  require(action.size() == spec_.action_dim, "env_step: action dimension mismatch");
  for (Eigen::Index i = 0; i < action.size(); ++i)
    require(action(i) >= -1.0 && action(i) <= 1.0, "env_step: action component outside [-1, 1]");

  Vector applied = action;
  if (spec_.action_noise_std > 0.0) {
    std::normal_distribution<double> noise(0.0, spec_.action_noise_std);
    for (Eigen::Index i = 0; i < applied.size(); ++i)
      applied(i) = std::clamp(applied(i) + noise(rng), -1.0, 1.0);
  }

  StepResult r;
  r.next = make_state(dynamics(current.state, applied), current.desired_goal,
                      current.step_index + 1);
  r.success = goal_reached(r.next.achieved_goal, r.next.desired_goal, spec_.success_tolerance);
  r.reward = goal_reward(r.next.achieved_goal, r.next.desired_goal, spec_.success_tolerance,
                         spec_.reward_convention);
  r.done = r.next.step_index == spec_.horizon;
  return r;
}

std::unique_ptr<GoalEnv> make_env(const std::string& name, const EnvOverrides& overrides) {
  GoalEnvSpec spec;
  if (name == "PointReach2D") {
    spec = PointReach2D::default_spec();
  } else if (name == "LMaze2D") {
    spec = LMaze2D::default_spec();
  } else if (name == "BlockPush2D") {
    spec = BlockPush2D::default_spec();
  } else {
    throw ContractViolation("unknown environment '" + name + "'");
  }
  if (overrides.horizon > 0) spec.horizon = overrides.horizon;
  if (overrides.success_tolerance > 0.0) spec.success_tolerance = overrides.success_tolerance;
  spec.action_noise_std = overrides.action_noise_std;
  spec.reward_convention = overrides.reward_convention;

  if (name == "PointReach2D") return std::make_unique<PointReach2D>(spec);
  if (name == "LMaze2D") return std::make_unique<LMaze2D>(spec);
  return std::make_unique<BlockPush2D>(spec);
}

}  // namespace gchr::env
