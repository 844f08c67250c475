#include "gchr/learn/agent.hpp"

#include "gchr/errors.hpp"

namespace gchr::learn {

GchrAgent::GchrAgent(int state_dim, int goal_dim, int action_dim, GchrConfig cfg,
                     replay::HerConfig her, env::RewardConvention convention, std::uint64_t seed)
    : cfg_(std::move(cfg)), her_(her), convention_(convention) {
  cfg_.validate();
  her_.validate();
  nets_ = AgentNets::create(state_dim, goal_dim, action_dim, cfg_.hidden_sizes, seed, cfg_.squash);
  actor_opt_ = nn::AdamState::for_network(nets_.actor, {.learning_rate = cfg_.actor_lr});
  critic_opt_ = nn::AdamState::for_network(nets_.critic, {.learning_rate = cfg_.critic_lr});
}

UpdateStats GchrAgent::update(const replay::HerBuffer& buffer, Rng& rng) {
  const auto batch = buffer.sample_batch(cfg_.batch_size, her_, rng);
  return update_on_batch(batch, &buffer, rng);
}

UpdateStats GchrAgent::update_on_batch(const replay::SampleBatch& batch,
                                       const replay::HerBuffer* buffer, Rng& rng) {
  UpdateStats stats;

  auto critic = critic_loss(batch, nets_, cfg_, convention_);
  nn::adam_step(nets_.critic, critic.grads, critic_opt_);
  stats.critic_loss = critic.value;

  std::vector<HgrPrior> priors;
  if (cfg_.beta > 0.0) {
    require(buffer != nullptr, "update: HGR needs the replay buffer for hindsight goal sets");
    priors.reserve(batch.size());
    for (int i = 0; i < batch.size(); ++i) {
      priors.push_back(build_hgr_prior(batch.states.col(i), buffer->find(batch.episode_ids[i]),
                                       nets_, cfg_, her_, rng));
    }
  }
  const auto noise = draw_actor_noise(nets_.action_dim, batch.size(),
                                      priors.empty() ? nullptr : &priors, cfg_.prior_samples, rng);
  auto actor = actor_loss(batch, noise, nets_, cfg_);
  nn::adam_step(nets_.actor, actor.grads, actor_opt_);
  stats.actor_loss = actor.terms.total;
  stats.q_term = actor.terms.q_term;
  stats.hsr = actor.terms.hsr;
  stats.hgr = actor.terms.hgr;

  ++step_;
  update_targets(nets_, cfg_, step_);
  return stats;
}

Vector policy_mean_action(const nn::Mlp& actor, const Vector& state, const Vector& goal,
                          bool squash) {
  Vector input(state.size() + goal.size());
  input << state, goal;
  const Vector raw = actor.forward(input);
  Vector mean = raw.head(raw.size() / 2);
  if (squash) mean = mean.array().tanh().matrix();
  return mean;
}

Vector GchrAgent::act(const Vector& state, const Vector& goal, bool deterministic, Rng& rng) const {
  if (deterministic) return policy_mean_action(nets_.actor, state, goal, nets_.squash);
  Vector input(state.size() + goal.size());
  input << state, goal;
  const auto head = nn::head_from_raw(nets_.actor.forward(input), nets_.squash);
  return nn::gaussian_sample(head, rng).action;
}

}  // namespace gchr::learn
