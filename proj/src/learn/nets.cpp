#include "gchr/learn/nets.hpp"

#include "gchr/errors.hpp"

namespace gchr::learn {

std::string to_string(PriorSource s) {
  return s == PriorSource::TargetActor ? "target_actor" : "delayed_copy";
}

PriorSource prior_source_from_string(const std::string& name) {
  if (name == "target_actor") return PriorSource::TargetActor;
  if (name == "delayed_copy") return PriorSource::DelayedCopy;
  throw ContractViolation("unknown prior source '" + name + "'");
}

void GchrConfig::validate() const {
  require(alpha >= 0.0 && beta >= 0.0, "GchrConfig: alpha and beta must be non-negative");
  require(gamma >= 0.0 && gamma < 1.0, "GchrConfig: gamma must lie in [0, 1)");
  require(polyak >= 0.0 && polyak <= 1.0, "GchrConfig: polyak must lie in [0, 1]");
  require(hindsight_k >= 0, "GchrConfig: hindsight_k must be >= 0");
  require(prior_samples >= 1, "GchrConfig: prior_samples must be >= 1");
  require(batch_size >= 1 && updates_per_cycle >= 1, "GchrConfig: batch sizes must be positive");
  require(tau_delay >= 1, "GchrConfig: tau_delay must be >= 1");
  require(entropy_coeff >= 0.0, "GchrConfig: entropy_coeff must be non-negative");
  require(actor_lr > 0.0 && critic_lr > 0.0, "GchrConfig: learning rates must be positive");
  for (int h : hidden_sizes) require(h > 0, "GchrConfig: hidden sizes must be positive");
}

AgentNets AgentNets::create(int state_dim, int goal_dim, int action_dim,
                            const std::vector<int>& hidden_sizes, std::uint64_t seed, bool squash) {
  AgentNets n;
  n.state_dim = state_dim;
  n.goal_dim = goal_dim;
  n.action_dim = action_dim;
  n.squash = squash;

  std::vector<int> actor_sizes{state_dim + goal_dim};
  actor_sizes.insert(actor_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  actor_sizes.push_back(2 * action_dim);
  std::vector<int> critic_sizes{state_dim + goal_dim + action_dim};
  critic_sizes.insert(critic_sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
  critic_sizes.push_back(1);

  n.actor = nn::Mlp::uniform_init(actor_sizes, nn::Activation::ReLU, seed);
  n.critic = nn::Mlp::uniform_init(critic_sizes, nn::Activation::ReLU, seed + 1);
  n.target_actor = n.actor;
  n.target_critic = n.critic;
  n.delayed_actor = n.actor;
  return n;
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  require(top.cols() == bottom.cols(), "stack_rows: column mismatch");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

Matrix stack_rows(const Matrix& top, const Matrix& middle, const Matrix& bottom) {
  require(top.cols() == middle.cols() && top.cols() == bottom.cols(), "stack_rows: column mismatch");
  Matrix out(top.rows() + middle.rows() + bottom.rows(), top.cols());
  out << top, middle, bottom;
  return out;
}

void update_targets(AgentNets& nets, const GchrConfig& cfg, std::int64_t global_step) {
  nn::polyak_average(nets.target_actor, nets.actor, cfg.polyak);
  nn::polyak_average(nets.target_critic, nets.critic, cfg.polyak);
  if (cfg.prior_source == PriorSource::DelayedCopy && global_step % cfg.tau_delay == 0)
    nets.delayed_actor = nets.actor;
}

}  // namespace gchr::learn
