#pragma once

#include <random>
#include <vector>

#include "gchr/env/goal_env.hpp"
#include "gchr/learn/hgr_prior.hpp"
#include "gchr/learn/nets.hpp"
#include "gchr/replay/her_buffer.hpp"

namespace gchr::learn {

struct LossResult {
  double value = 0.0;
  nn::MlpGradients grads;
};

struct ValueRange {
  double lo;
  double hi;
};

/// Feasible discounted-return range: [0, 1/(1-gamma)] for ZeroOne rewards,
/// [-1/(1-gamma), 0] for NegOneZero.
ValueRange value_range(env::RewardConvention convention, double gamma);

/// Mean squared TD error against y = clip(r + gamma * Qbar(s', mean action of
/// the target actor, g)). Gradients are for the online critic. Throws
/// NumericError naming the first sample with a non-finite target.
LossResult critic_loss(const replay::SampleBatch& batch, const AgentNets& nets,
                       const GchrConfig& cfg, env::RewardConvention convention);

/// TD targets used by critic_loss, exposed for inspection.
Vector critic_targets(const replay::SampleBatch& batch, const AgentNets& nets,
                      const GchrConfig& cfg, env::RewardConvention convention);

/// Behaviour cloning on hindsight-relabeled transitions:
/// -(1/N) sum log pi(a_t | s_t, g'_t). Actor gradients.
LossResult hsr_loss(const Matrix& states, const Matrix& actions, const Matrix& goals,
                    const nn::Mlp& actor, bool squash);
/// Same, for a batch whose samples are all relabeled (uses the effective goals).
LossResult hsr_loss(const replay::SampleBatch& relabeled_batch, const nn::Mlp& actor, bool squash);

/// Cross-entropy estimator of KL(prior || pi): -(1/(N M)) sum log pi(a | s, g)
/// over M prior draws per element. Shares its actor gradient with the KL
/// because the prior entropy does not depend on the actor.
LossResult hgr_loss(const Matrix& states, const Matrix& goals, const PriorDraws& draws,
                    const nn::Mlp& actor, bool squash);
LossResult hgr_loss(const Matrix& states, const Matrix& goals, const std::vector<HgrPrior>& priors,
                    const nn::Mlp& actor, const GchrConfig& cfg, Rng& rng);

/// All randomness consumed by one actor_loss evaluation. Holding it fixed
/// makes the loss a deterministic function of the actor parameters.
struct ActorNoise {
  Matrix policy_noise;  // action_dim x N standard normals for reparameterization
  PriorDraws prior;     // empty when beta == 0
};

ActorNoise draw_actor_noise(int action_dim, int batch_size, const std::vector<HgrPrior>* priors,
                            int prior_samples, Rng& rng);

struct ActorLossTerms {
  double q_term = 0.0;   // -mean Q(s, a~, g)
  double hsr = 0.0;      // unweighted
  double hgr = 0.0;      // unweighted
  double entropy = 0.0;  // mean log pi(a~ | s, g)
  double total = 0.0;
};

struct ActorLossResult {
  ActorLossTerms terms;
  nn::MlpGradients grads;
};

/// total = -E[Q(s, a~, g)] + alpha * hsr + beta * hgr + entropy_coeff * E[log pi(a~)].
/// The Q term uses the batch's effective goals, HSR its relabeled samples,
/// HGR the original goals with priors from `noise.prior`. The critic is
/// read only.
ActorLossResult actor_loss(const replay::SampleBatch& batch, const ActorNoise& noise,
                           const AgentNets& nets, const GchrConfig& cfg);

}  // namespace gchr::learn
