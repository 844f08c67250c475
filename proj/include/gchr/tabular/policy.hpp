#pragma once

#include <vector>

#include "gchr/env/tabular_mdp.hpp"

namespace gchr::tabular {

/// Goal-conditioned stochastic policy pi(a | s, g) stored as probs[s][g][a].
class TabularPolicy {
 public:
  TabularPolicy() = default;
  TabularPolicy(int n_states, int n_goals, int n_actions);

  static TabularPolicy uniform(int n_states, int n_goals, int n_actions);
  static TabularPolicy uniform(const env::TabularGCMDP& mdp);

  int n_states() const { return n_states_; }
  int n_goals() const { return n_goals_; }
  int n_actions() const { return n_actions_; }

  double prob(int s, int g, int a) const { return probs_[index(s, g, a)]; }
  double& prob(int s, int g, int a) { return probs_[index(s, g, a)]; }
  const double* row(int s, int g) const { return probs_.data() + index(s, g, 0); }

  /// Puts all mass of pi(. | s, g) on `a`.
  void set_deterministic(int s, int g, int a);

  /// Every probs[s][g] is a distribution within 1e-12.
  void validate() const;
  void require_compatible(const env::TabularGCMDP& mdp) const;

  bool operator==(const TabularPolicy&) const = default;

 private:
  std::size_t index(int s, int g, int a) const {
    return (static_cast<std::size_t>(s) * n_goals_ + g) * n_actions_ + a;
  }

  int n_states_ = 0;
  int n_goals_ = 0;
  int n_actions_ = 0;
  std::vector<double> probs_;
};

}  // namespace gchr::tabular
