#pragma once

#include <cstdint>

#include "gchr/env/goal_env.hpp"
#include "gchr/learn/losses.hpp"
#include "gchr/nn/adam.hpp"

namespace gchr::learn {

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double q_term = 0.0;
  double hsr = 0.0;
  double hgr = 0.0;
};

/// Off-policy goal-conditioned actor-critic with the hindsight regularizers.
/// One update is: sample, critic step, actor step against the updated
/// critic, target update.
class GchrAgent {
 public:
  GchrAgent(int state_dim, int goal_dim, int action_dim, GchrConfig cfg, replay::HerConfig her,
            env::RewardConvention convention, std::uint64_t seed);

  UpdateStats update(const replay::HerBuffer& buffer, Rng& rng);
  /// Update on a given batch; `buffer` supplies the source trajectories of
  /// the HGR priors and may be null when beta == 0.
  UpdateStats update_on_batch(const replay::SampleBatch& batch, const replay::HerBuffer* buffer,
                              Rng& rng);

  /// squash(mean) when deterministic, otherwise a policy sample.
  Vector act(const Vector& state, const Vector& goal, bool deterministic, Rng& rng) const;

  const AgentNets& nets() const { return nets_; }
  AgentNets& nets() { return nets_; }
  const GchrConfig& config() const { return cfg_; }
  const replay::HerConfig& her_config() const { return her_; }
  std::int64_t step() const { return step_; }

 private:
  GchrConfig cfg_;
  replay::HerConfig her_;
  env::RewardConvention convention_;
  AgentNets nets_;
  nn::AdamState actor_opt_;
  nn::AdamState critic_opt_;
  std::int64_t step_ = 0;
};

/// Deterministic action of a policy network: squash(mean).
Vector policy_mean_action(const nn::Mlp& actor, const Vector& state, const Vector& goal,
                          bool squash = true);

}  // namespace gchr::learn
