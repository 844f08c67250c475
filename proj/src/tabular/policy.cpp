#include "gchr/tabular/policy.hpp"

#include <cmath>
#include <string>

#include "gchr/errors.hpp"

namespace gchr::tabular {

TabularPolicy::TabularPolicy(int n_states, int n_goals, int n_actions)
    : n_states_(n_states), n_goals_(n_goals), n_actions_(n_actions) {
  require(n_states > 0 && n_goals > 0 && n_actions > 0, "TabularPolicy: sizes must be positive");
  probs_.assign(static_cast<std::size_t>(n_states) * n_goals * n_actions, 0.0);
}

TabularPolicy TabularPolicy::uniform(int n_states, int n_goals, int n_actions) {
  TabularPolicy pi(n_states, n_goals, n_actions);
  for (double& p : pi.probs_) p = 1.0 / n_actions;
  return pi;
}

TabularPolicy TabularPolicy::uniform(const env::TabularGCMDP& mdp) {
  return uniform(mdp.n_states(), mdp.n_goals(), mdp.n_actions());
}

void TabularPolicy::set_deterministic(int s, int g, int a) {
  require(a >= 0 && a < n_actions_, "TabularPolicy: action out of range");
  for (int b = 0; b < n_actions_; ++b) prob(s, g, b) = b == a ? 1.0 : 0.0;
}

void TabularPolicy::validate() const {
  for (int s = 0; s < n_states_; ++s) {
    for (int g = 0; g < n_goals_; ++g) {
      double sum = 0.0;
      for (int a = 0; a < n_actions_; ++a) {
        const double p = prob(s, g, a);
        require(p >= 0.0 && std::isfinite(p), "TabularPolicy: bad probability at s=" +
                                                   std::to_string(s) + " g=" + std::to_string(g));
        sum += p;
      }
      require(std::abs(sum - 1.0) <= 1e-12, "TabularPolicy: pi(.|s=" + std::to_string(s) +
                                                ", g=" + std::to_string(g) + ") sums to " +
                                                std::to_string(sum));
    }
  }
}

void TabularPolicy::require_compatible(const env::TabularGCMDP& mdp) const {
  require(n_states_ == mdp.n_states() && n_goals_ == mdp.n_goals() &&
              n_actions_ == mdp.n_actions(),
          "TabularPolicy: shape does not match the MDP");
}

}  // namespace gchr::tabular
