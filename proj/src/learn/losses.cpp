#include "gchr/learn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "gchr/errors.hpp"

namespace gchr::learn {

ValueRange value_range(env::RewardConvention convention, double gamma) {
  const double horizon = 1.0 / (1.0 - gamma);
  if (convention == env::RewardConvention::ZeroOne) return {0.0, horizon};
  return {-horizon, 0.0};
}

namespace {

// Deterministic action of a raw Gaussian output: squash(mean).
Matrix mean_actions(const Matrix& raw, bool squash) {
  const auto dim = raw.rows() / 2;
  Matrix a = raw.topRows(dim);
  if (squash) a = a.array().tanh().matrix();
  return a;
}

}  // namespace

Vector critic_targets(const replay::SampleBatch& batch, const AgentNets& nets,
                      const GchrConfig& cfg, env::RewardConvention convention) {
  const Matrix next_actions =
      mean_actions(nets.target_actor.forward(stack_rows(batch.next_states, batch.goals)), nets.squash);
  const Matrix q_next =
      nets.target_critic.forward(stack_rows(batch.next_states, batch.goals, next_actions));
  const auto range = value_range(convention, cfg.gamma);
  Vector y(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    const double raw = batch.rewards(i) + cfg.gamma * q_next(0, i);
    if (!std::isfinite(raw))
      throw NumericError("critic_loss: non-finite TD target at sample " + std::to_string(i));
    y(i) = std::clamp(raw, range.lo, range.hi);
  }
  return y;
}

LossResult critic_loss(const replay::SampleBatch& batch, const AgentNets& nets,
                       const GchrConfig& cfg, env::RewardConvention convention) {
  require(batch.size() > 0, "critic_loss: empty batch");
  const Vector y = critic_targets(batch, nets, cfg, convention);
  nn::ForwardTape tape;
  const Matrix q = nets.critic.forward(stack_rows(batch.states, batch.goals, batch.actions), tape);
  const double n = batch.size();
  const Eigen::RowVectorXd err = y.transpose() - q.row(0);
  LossResult out;
  out.value = err.squaredNorm() / n;
  const Matrix upstream = (-2.0 / n) * err;
  out.grads = nets.critic.backward(tape, upstream);
  return out;
}

LossResult hsr_loss(const Matrix& states, const Matrix& actions, const Matrix& goals,
                    const nn::Mlp& actor, bool squash) {
  const auto n = states.cols();
  require(n > 0, "hsr_loss: empty batch");
  require(actions.cols() == n && goals.cols() == n, "hsr_loss: column count mismatch");
  nn::ForwardTape tape;
  const Matrix raw = actor.forward(stack_rows(states, goals), tape);
  const int dim = static_cast<int>(actions.rows());
  require(raw.rows() == 2 * dim, "hsr_loss: action dimension mismatch");
  Matrix grad_raw = Matrix::Zero(raw.rows(), n);
  const double scale = -1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    sum += nn::raw_log_prob(raw.col(i).data(), actions.col(i).data(), dim, squash, scale,
                            grad_raw.col(i).data());
  LossResult out;
  out.value = -sum / static_cast<double>(n);
  out.grads = actor.backward(tape, grad_raw);
  return out;
}

LossResult hsr_loss(const replay::SampleBatch& relabeled_batch, const nn::Mlp& actor, bool squash) {
  for (int i = 0; i < relabeled_batch.size(); ++i)
    require(relabeled_batch.relabeled[i] != 0, "hsr_loss: sample " + std::to_string(i) +
                                                   " is not relabeled");
  return hsr_loss(relabeled_batch.states, relabeled_batch.actions, relabeled_batch.goals, actor,
                  squash);
}

namespace {

// Adds the HGR cross-entropy gradient (times `weight`) to grad_raw and
// returns the unweighted loss value.
double hgr_into(const Matrix& raw, const PriorDraws& draws, bool squash, double weight,
                Matrix& grad_raw) {
  const auto n = raw.cols();
  const int m = draws.per_element;
  const int dim = static_cast<int>(raw.rows() / 2);
  require(draws.actions.cols() == n * m && draws.actions.rows() == dim,
          "hgr_loss: prior draws do not match the batch");
  const double scale = -weight / static_cast<double>(n * m);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      sum += nn::raw_log_prob_pre_squash(raw.col(i).data(), draws.pre_squash.col(i * m + j).data(),
                                         dim, squash, scale, grad_raw.col(i).data());
    }
  }
  return -sum / static_cast<double>(n * m);
}

}  // namespace

LossResult hgr_loss(const Matrix& states, const Matrix& goals, const PriorDraws& draws,
                    const nn::Mlp& actor, bool squash) {
  require(states.cols() > 0 && states.cols() == goals.cols(), "hgr_loss: bad batch");
  require(!draws.empty(), "hgr_loss: no prior draws");
  nn::ForwardTape tape;
  const Matrix raw = actor.forward(stack_rows(states, goals), tape);
  Matrix grad_raw = Matrix::Zero(raw.rows(), raw.cols());
  LossResult out;
  out.value = hgr_into(raw, draws, squash, 1.0, grad_raw);
  out.grads = actor.backward(tape, grad_raw);
  return out;
}

LossResult hgr_loss(const Matrix& states, const Matrix& goals, const std::vector<HgrPrior>& priors,
                    const nn::Mlp& actor, const GchrConfig& cfg, Rng& rng) {
  require(static_cast<Eigen::Index>(priors.size()) == states.cols(),
          "hgr_loss: need one prior per batch element");
  const auto draws = draw_prior_actions(priors, cfg.prior_samples, rng);
  return hgr_loss(states, goals, draws, actor, priors.front().squash());
}

ActorNoise draw_actor_noise(int action_dim, int batch_size, const std::vector<HgrPrior>* priors,
                            int prior_samples, Rng& rng) {
  ActorNoise noise;
  noise.policy_noise.resize(action_dim, batch_size);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < batch_size; ++i)
    for (int d = 0; d < action_dim; ++d) noise.policy_noise(d, i) = normal(rng);
  if (priors != nullptr && !priors->empty())
    noise.prior = draw_prior_actions(*priors, prior_samples, rng);
  return noise;
}

ActorLossResult actor_loss(const replay::SampleBatch& batch, const ActorNoise& noise,
                           const AgentNets& nets, const GchrConfig& cfg) {
  const int n = batch.size();
  const int dim = nets.action_dim;
  require(n > 0, "actor_loss: empty batch");
  require(noise.policy_noise.rows() == dim && noise.policy_noise.cols() == n,
          "actor_loss: policy noise has the wrong shape");
  const bool use_hgr = cfg.beta > 0.0;
  require(!use_hgr || !noise.prior.empty(), "actor_loss: beta > 0 requires prior draws");

  ActorLossResult out;
  auto& terms = out.terms;

  // Main pass at the effective goals: Q term, entropy, HSR.
  nn::ForwardTape tape;
  const Matrix raw = nets.actor.forward(stack_rows(batch.states, batch.goals), tape);
  Matrix grad_raw = Matrix::Zero(raw.rows(), n);

  Matrix actions(dim, n);
  double logp_sum = 0.0;
  for (int i = 0; i < n; ++i)
    logp_sum += nn::raw_reparam_sample(raw.col(i).data(), noise.policy_noise.col(i).data(), dim,
                                       nets.squash, actions.col(i).data());
  terms.entropy = logp_sum / n;

  nn::ForwardTape critic_tape;
  const Matrix q =
      nets.critic.forward(stack_rows(batch.states, batch.goals, actions), critic_tape);
  terms.q_term = -q.sum() / n;
  const Matrix d_input =
      nets.critic.input_gradient(critic_tape, Matrix::Constant(1, n, -1.0 / n));
  const auto action_row = nets.state_dim + nets.goal_dim;
  for (int i = 0; i < n; ++i) {
    const Vector d_action = d_input.col(i).segment(action_row, dim);
    nn::raw_reparam_backward(raw.col(i).data(), noise.policy_noise.col(i).data(), dim,
                             nets.squash, d_action.data(), cfg.entropy_coeff / n,
                             grad_raw.col(i).data());
  }

  const int n_relabeled = batch.relabeled_count();
  if (n_relabeled > 0) {
    const double scale = -cfg.alpha / n_relabeled;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!batch.relabeled[i]) continue;
      sum += nn::raw_log_prob(raw.col(i).data(), batch.actions.col(i).data(), dim, nets.squash,
                              scale, grad_raw.col(i).data());
    }
    terms.hsr = -sum / n_relabeled;
  }

  out.grads = nets.actor.backward(tape, grad_raw);

  // HGR pass at the original goals.
  if (use_hgr) {
    nn::ForwardTape hgr_tape;
    const Matrix raw_orig = nets.actor.forward(stack_rows(batch.states, batch.original_goals), hgr_tape);
    Matrix grad_orig = Matrix::Zero(raw_orig.rows(), n);
    terms.hgr = hgr_into(raw_orig, noise.prior, nets.squash, cfg.beta, grad_orig);
    nn::add_scaled(out.grads, nets.actor.backward(hgr_tape, grad_orig));
  }

  terms.total = terms.q_term + cfg.alpha * terms.hsr + cfg.beta * terms.hgr +
                cfg.entropy_coeff * terms.entropy;
  return out;
}

}  // namespace gchr::learn
