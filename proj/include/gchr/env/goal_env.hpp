#pragma once

#include <memory>
#include <random>
#include <string>

#include "gchr/nn/mlp.hpp"

namespace gchr::env {

using nn::Vector;
using Rng = std::mt19937_64;

enum class RewardConvention { ZeroOne, NegOneZero };

std::string to_string(RewardConvention c);
RewardConvention reward_convention_from_string(const std::string& name);

struct GoalEnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  int goal_dim = 0;
  int horizon = 1;
  double success_tolerance = 0.05;
  RewardConvention reward_convention = RewardConvention::ZeroOne;
  double action_noise_std = 0.0;

  void validate() const;
};

struct GoalEnvState {
  Vector state;
  Vector achieved_goal;
  Vector desired_goal;
  int step_index = 0;
};

struct StepResult {
  GoalEnvState next;
  double reward = 0.0;
  bool done = false;
  bool success = false;
};

bool goal_reached(const Vector& achieved, const Vector& desired, double tolerance);

/// Sparse indicator reward I{||achieved - desired|| <= tolerance}, shifted to
/// {-1, 0} under NegOneZero.
double goal_reward(const Vector& achieved, const Vector& desired, double tolerance,
                   RewardConvention convention);

/// Goal-conditioned episodic environment. Instances are immutable; episode
/// state travels in GoalEnvState so rollouts on one instance may run from
/// several threads, each with its own rng.
class GoalEnv {
 public:
  explicit GoalEnv(GoalEnvSpec spec);
  virtual ~GoalEnv() = default;

  const GoalEnvSpec& spec() const { return spec_; }
  virtual std::string name() const = 0;

  /// State-to-goal projection.
  virtual Vector phi(const Vector& state) const = 0;

  GoalEnvState reset(Rng& rng) const;

  /// Advances one step. Actions must lie in [-1, 1]^action_dim; Gaussian
  /// action noise, when configured, is added and the result re-clipped.
  StepResult step(const GoalEnvState& current, const Vector& action, Rng& rng) const;

  GoalEnvState make_state(Vector state, Vector desired_goal, int step_index = 0) const;

 protected:
  virtual Vector sample_start(Rng& rng) const = 0;
  virtual Vector sample_goal(Rng& rng) const = 0;
  virtual Vector dynamics(const Vector& state, const Vector& action) const = 0;

 private:
  GoalEnvSpec spec_;
};

/// Overrides applied on top of an environment's defaults. Numeric values
/// <= 0 keep the default (noise is applied as given).
struct EnvOverrides {
  int horizon = 0;
  double success_tolerance = 0.0;
  double action_noise_std = 0.0;
  RewardConvention reward_convention = RewardConvention::ZeroOne;
};

/// "PointReach2D", "LMaze2D" or "BlockPush2D".
std::unique_ptr<GoalEnv> make_env(const std::string& name, const EnvOverrides& overrides = {});

}  // namespace gchr::env
