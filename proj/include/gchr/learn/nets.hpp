#pragma once

#include <cstdint>

#include "gchr/learn/config.hpp"
#include "gchr/nn/mlp.hpp"

namespace gchr::learn {

using nn::Matrix;
using nn::Vector;

/// Online actor and critic with their slow copies. The actor maps
/// [state; goal] to 2*action_dim raw Gaussian outputs, the critic maps
/// [state; goal; action] to a scalar.
struct AgentNets {
  int state_dim = 0;
  int goal_dim = 0;
  int action_dim = 0;
  bool squash = true;

  nn::Mlp actor;
  nn::Mlp critic;
  nn::Mlp target_actor;
  nn::Mlp target_critic;
  nn::Mlp delayed_actor;

  static AgentNets create(int state_dim, int goal_dim, int action_dim,
                          const std::vector<int>& hidden_sizes, std::uint64_t seed,
                          bool squash = true);

  const nn::Mlp& prior_policy(PriorSource source) const {
    return source == PriorSource::TargetActor ? target_actor : delayed_actor;
  }
};

Matrix stack_rows(const Matrix& top, const Matrix& bottom);
Matrix stack_rows(const Matrix& top, const Matrix& middle, const Matrix& bottom);

/// Polyak-averages both targets; refreshes the delayed actor by hard copy
/// every tau_delay steps when it is the prior source.
void update_targets(AgentNets& nets, const GchrConfig& cfg, std::int64_t global_step);

}  // namespace gchr::learn
