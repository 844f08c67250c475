#include "gchr/learn/hgr_prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gchr/errors.hpp"

namespace gchr::learn {

HgrPrior::HgrPrior(const nn::Mlp& prior_policy, Vector state, Matrix goals, bool squash)
    : policy_(&prior_policy), state_(std::move(state)), goals_(std::move(goals)), squash_(squash) {
  require(goals_.cols() >= 1, "HgrPrior: needs at least one hindsight goal");
  require(state_.size() + goals_.rows() == prior_policy.input_dim(),
          "HgrPrior: state/goal dimensions do not match the prior policy");
}

nn::DiagGaussianHead HgrPrior::component(int k) const {
  require(k >= 0 && k < size(), "HgrPrior: component index out of range");
  Vector input(state_.size() + goals_.rows());
  input << state_, goals_.col(k);
  return nn::head_from_raw(policy_->forward(input), squash_);
}

Vector HgrPrior::sample(Rng& rng) const {
  const int k = std::uniform_int_distribution<int>(0, size() - 1)(rng);
  return nn::gaussian_sample(component(k), rng).action;
}

double HgrPrior::log_density(const Vector& action) const {
  Matrix inputs(state_.size() + goals_.rows(), size());
  inputs.topRows(state_.size()).colwise() = state_;
  inputs.bottomRows(goals_.rows()) = goals_;
  const Matrix raw = policy_->forward(inputs);
  const int dim = static_cast<int>(action.size());
  require(2 * dim == raw.rows(), "HgrPrior: action dimension mismatch");
  std::vector<double> lps(size());
  for (int k = 0; k < size(); ++k)
    lps[k] = nn::raw_log_prob(raw.col(k).data(), action.data(), dim, squash_, 0.0, nullptr);
  const double mx = *std::max_element(lps.begin(), lps.end());
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double lp : lps) acc += std::exp(lp - mx);
  return mx + std::log(acc) - std::log(static_cast<double>(size()));
}

HgrPrior build_hgr_prior(const Vector& state, const replay::StoredTrajectory& source,
                         const AgentNets& nets, const GchrConfig& cfg,
                         const replay::HerConfig& her, Rng& rng) {
  const auto& set = source.hindsight_goals;
  const int n = static_cast<int>(set.size());
  const int k = cfg.hindsight_k > 0 ? cfg.hindsight_k
                                    : replay::default_hindsight_k(her.hindsight_goal_fraction, n);
  const auto idx = replay::sample_hindsight_goal_indices(n, k, rng);
  Matrix goals(nets.goal_dim, k);
  for (int j = 0; j < k; ++j) goals.col(j) = set[idx[j]];
  return HgrPrior(nets.prior_policy(cfg.prior_source), state, std::move(goals), nets.squash);
}

PriorDraws draw_prior_actions(const std::vector<HgrPrior>& priors, int m, Rng& rng) {
  require(m >= 1, "draw_prior_actions: need at least one sample per element");
  PriorDraws out;
  if (priors.empty()) return out;
  const auto& policy = priors.front().policy();
  const bool squash = priors.front().squash();
  for (const auto& p : priors)
    require(&p.policy() == &policy, "draw_prior_actions: priors must share one prior policy");

  const int n = static_cast<int>(priors.size());
  const auto sd = priors.front().state().size();
  const auto gd = priors.front().goals().rows();
  Matrix inputs(sd + gd, static_cast<Eigen::Index>(n) * m);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, priors[i].size() - 1);
    for (int j = 0; j < m; ++j) {
      const auto c = static_cast<Eigen::Index>(i) * m + j;
      inputs.col(c).head(sd) = priors[i].state();
      inputs.col(c).tail(gd) = priors[i].goals().col(pick(rng));
    }
  }
  const Matrix raw = policy.forward(inputs);
  const int dim = static_cast<int>(raw.rows() / 2);
  Matrix noise(dim, inputs.cols());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index c = 0; c < noise.cols(); ++c)
    for (int d = 0; d < dim; ++d) noise(d, c) = normal(rng);

  out.actions.resize(dim, inputs.cols());
  out.pre_squash.resize(dim, inputs.cols());
  for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
    for (int d = 0; d < dim; ++d)
      out.pre_squash(d, c) = raw(d, c) + std::exp(nn::log_std_from_raw(raw(dim + d, c))) * noise(d, c);
    nn::raw_reparam_sample(raw.col(c).data(), noise.col(c).data(), dim, squash,
                           out.actions.col(c).data());
  }
  out.per_element = m;
  return out;
}

}  // namespace gchr::learn
