#include "gchr/env/tasks.hpp"

#include <algorithm>
#include <cmath>

namespace gchr::env {

namespace {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Velocity update shared by the point-mass tasks.
void integrate_velocity(double& vx, double& vy, const Vector& action, double max_speed) {
  constexpr double dv = PointReach2D::kAccelGain * PointReach2D::kDt;
  vx = std::clamp(vx + dv * action(0), -max_speed, max_speed);
  vy = std::clamp(vy + dv * action(1), -max_speed, max_speed);
}

}  // namespace

// PointReach2D ---------------------------------------------------------------

GoalEnvSpec PointReach2D::default_spec() {
  GoalEnvSpec s;
  s.state_dim = 4;
  s.action_dim = 2;
  s.goal_dim = 2;
  s.horizon = 50;
  return s;
}

PointReach2D::PointReach2D(GoalEnvSpec spec) : GoalEnv(spec) {}

Vector PointReach2D::sample_start(Rng& rng) const {
  Vector s = Vector::Zero(4);
  s(0) = uniform(rng, -kStartJitter, kStartJitter);
  s(1) = uniform(rng, -kStartJitter, kStartJitter);
  return s;
}

Vector PointReach2D::sample_goal(Rng& rng) const {
  Vector g(2);
  g(0) = uniform(rng, -1.0, 1.0);
  g(1) = uniform(rng, -1.0, 1.0);
  return g;
}

Vector PointReach2D::dynamics(const Vector& state, const Vector& action) const {
  double x = state(0), y = state(1), vx = state(2), vy = state(3);
  integrate_velocity(vx, vy, action, kMaxSpeed);
  x += kDt * vx;
  y += kDt * vy;
  if (std::abs(x) > kArena) {
    x = std::clamp(x, -kArena, kArena);
    vx = 0.0;
  }
  if (std::abs(y) > kArena) {
    y = std::clamp(y, -kArena, kArena);
    vy = 0.0;
  }
  Vector next(4);
  next << x, y, vx, vy;
  return next;
}

// LMaze2D --------------------------------------------------------------------

GoalEnvSpec LMaze2D::default_spec() {
  GoalEnvSpec s = PointReach2D::default_spec();
  s.horizon = 100;
  return s;
}

LMaze2D::LMaze2D(GoalEnvSpec spec) : GoalEnv(spec) {}

Vector LMaze2D::sample_start(Rng& rng) const {
  Vector s = Vector::Zero(4);
  s(0) = uniform(rng, kStartCell.x0, kStartCell.x1);
  s(1) = uniform(rng, kStartCell.y0, kStartCell.y1);
  return s;
}

Vector LMaze2D::sample_goal(Rng& rng) const {
  Vector g(2);
  g(0) = uniform(rng, kGoalRegion.x0, kGoalRegion.x1);
  g(1) = uniform(rng, kGoalRegion.y0, kGoalRegion.y1);
  return g;
}

Vector LMaze2D::dynamics(const Vector& state, const Vector& action) const {
  const double x = state(0), y = state(1);
  double vx = state(2), vy = state(3);
  integrate_velocity(vx, vy, action, kMaxSpeed);
  const double nx = x + PointReach2D::kDt * vx;
  const double ny = y + PointReach2D::kDt * vy;

  Vector next(4);
  if (is_free(nx, ny)) {
    next << nx, ny, vx, vy;
  } else if (is_free(nx, y)) {
    next << nx, y, vx, 0.0;
  } else if (is_free(x, ny)) {
    next << x, ny, 0.0, vy;
  } else {
    next << x, y, 0.0, 0.0;
  }
  return next;
}

// BlockPush2D ----------------------------------------------------------------

GoalEnvSpec BlockPush2D::default_spec() {
  GoalEnvSpec s;
  s.state_dim = 4;
  s.action_dim = 2;
  s.goal_dim = 2;
  s.horizon = 60;
  return s;
}

BlockPush2D::BlockPush2D(GoalEnvSpec spec) : GoalEnv(spec) {}

Vector BlockPush2D::sample_start(Rng& rng) const {
  Vector s(4);
  s(0) = uniform(rng, -0.05, 0.05);
  s(1) = uniform(rng, -0.55, -0.45);
  s(2) = uniform(rng, -0.1, 0.1);
  s(3) = uniform(rng, -0.1, 0.1);
  return s;
}

Vector BlockPush2D::sample_goal(Rng& rng) const {
  Vector g(2);
  g(0) = uniform(rng, -0.5, 0.5);
  g(1) = uniform(rng, -0.5, 0.5);
  return g;
}

Vector BlockPush2D::dynamics(const Vector& state, const Vector& action) const {
  const double limit_agent = kArena - kAgentRadius;
  const double limit_block = kArena - kBlockRadius;
  const double ax = std::clamp(state(0) + kAgentStep * action(0), -limit_agent, limit_agent);
  const double ay = std::clamp(state(1) + kAgentStep * action(1), -limit_agent, limit_agent);
  double bx = state(2), by = state(3);

  const double contact = kAgentRadius + kBlockRadius;
  const double dx = bx - ax, dy = by - ay;
  const double dist = std::hypot(dx, dy);
  if (dist < contact) {
    double nx = 0.0, ny = 0.0;
    if (dist > 1e-12) {
      nx = dx / dist;
      ny = dy / dist;
    } else {
      // Coincident centres: push along the motion direction.
      const double m = std::hypot(action(0), action(1));
      nx = m > 1e-12 ? action(0) / m : 1.0;
      ny = m > 1e-12 ? action(1) / m : 0.0;
    }
    bx = std::clamp(ax + nx * contact, -limit_block, limit_block);
    by = std::clamp(ay + ny * contact, -limit_block, limit_block);
  }
  Vector next(4);
  next << ax, ay, bx, by;
  return next;
}

}  // namespace gchr::env
