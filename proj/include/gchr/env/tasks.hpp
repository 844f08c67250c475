#pragma once

#include "gchr/env/goal_env.hpp"

namespace gchr::env {

/// Planar double integrator. State (x, y, vx, vy), goal (x, y).
class PointReach2D : public GoalEnv {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kAccelGain = 5.0;
  static constexpr double kMaxSpeed = 1.0;
  static constexpr double kArena = 1.2;
  static constexpr double kStartJitter = 0.05;

  static GoalEnvSpec default_spec();
  explicit PointReach2D(GoalEnvSpec spec = default_spec());

  std::string name() const override { return "PointReach2D"; }
  Vector phi(const Vector& state) const override { return state.head(2); }

 protected:
  Vector sample_start(Rng& rng) const override;
  Vector sample_goal(Rng& rng) const override;
  Vector dynamics(const Vector& state, const Vector& action) const override;
};

/// The PointReach2D point mass confined to an L-shaped corridor: a bottom
/// strip joined to a right-hand strip. Episodes start in the bottom-left cell
/// and goals are drawn from the top-right region. Moves into a wall are
/// projected onto the free axis and the blocked velocity component is zeroed.
class LMaze2D : public GoalEnv {
 public:
  struct Box {
    double x0, x1, y0, y1;
    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  };
  static constexpr Box kBottom{-2.0, 2.0, -2.0, -1.2};
  static constexpr Box kRight{1.2, 2.0, -2.0, 2.0};
  static constexpr Box kStartCell{-1.9, -1.7, -1.7, -1.5};
  static constexpr Box kGoalRegion{1.4, 1.8, 1.4, 1.8};
  static constexpr double kMaxSpeed = 1.0;

  static GoalEnvSpec default_spec();
  explicit LMaze2D(GoalEnvSpec spec = default_spec());

  static bool is_free(double x, double y) { return kBottom.contains(x, y) || kRight.contains(x, y); }

  std::string name() const override { return "LMaze2D"; }
  Vector phi(const Vector& state) const override { return state.head(2); }

 protected:
  Vector sample_start(Rng& rng) const override;
  Vector sample_goal(Rng& rng) const override;
  Vector dynamics(const Vector& state, const Vector& action) const override;
};

/// A kinematic agent disc pushes a block disc. State (agent x, agent y,
/// block x, block y), goal = block position.
class BlockPush2D : public GoalEnv {
 public:
  static constexpr double kAgentStep = 0.06;
  static constexpr double kAgentRadius = 0.05;
  static constexpr double kBlockRadius = 0.1;
  static constexpr double kArena = 1.0;

  static GoalEnvSpec default_spec();
  explicit BlockPush2D(GoalEnvSpec spec = default_spec());

  std::string name() const override { return "BlockPush2D"; }
  Vector phi(const Vector& state) const override { return state.tail(2); }

 protected:
  Vector sample_start(Rng& rng) const override;
  Vector sample_goal(Rng& rng) const override;
  Vector dynamics(const Vector& state, const Vector& action) const override;
};

}  // namespace gchr::env
