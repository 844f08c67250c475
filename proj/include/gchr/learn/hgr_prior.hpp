#pragma once

#include <random>
#include <vector>

#include "gchr/learn/nets.hpp"
#include "gchr/nn/gaussian.hpp"
#include "gchr/replay/her_buffer.hpp"

namespace gchr::learn {

using Rng = std::mt19937_64;

/// Equal-weight mixture of a prior policy's conditionals at one state, one
/// component per hindsight goal: (1/K) sum_k pi'(a | s, g'_k).
/// Holds a non-owning pointer to the prior network, which must outlive it.
class HgrPrior {
 public:
  HgrPrior(const nn::Mlp& prior_policy, Vector state, Matrix goals, bool squash);

  int size() const { return static_cast<int>(goals_.cols()); }
  const Vector& state() const { return state_; }
  const Matrix& goals() const { return goals_; }  // goal_dim x K
  const nn::Mlp& policy() const { return *policy_; }
  bool squash() const { return squash_; }

  nn::DiagGaussianHead component(int k) const;
  Vector sample(Rng& rng) const;
  /// log((1/K) sum_k pi'(a | s, g'_k)) via log-sum-exp.
  double log_density(const Vector& action) const;

 private:
  const nn::Mlp* policy_;
  Vector state_;
  Matrix goals_;
  bool squash_;
};

/// Prior for a state taken from `source`: K goals drawn uniformly from the
/// trajectory's hindsight goal set (K from cfg.hindsight_k, or the HER goal
/// fraction when that is 0), mixed under the configured prior policy.
HgrPrior build_hgr_prior(const Vector& state, const replay::StoredTrajectory& source,
                         const AgentNets& nets, const GchrConfig& cfg,
                         const replay::HerConfig& her, Rng& rng);

/// Monte-Carlo draws from a batch of priors: column i * m + j holds draw j
/// for element i.
struct PriorDraws {
  Matrix actions;
  Matrix pre_squash;  // Gaussian variates before tanh
  int per_element = 0;
  bool empty() const { return per_element == 0; }
};

/// Draws `m` actions per prior. All component choices are drawn first, then
/// the Gaussian noise, so results depend only on the rng state.
PriorDraws draw_prior_actions(const std::vector<HgrPrior>& priors, int m, Rng& rng);

}  // namespace gchr::learn
