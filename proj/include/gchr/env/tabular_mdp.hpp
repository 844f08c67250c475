#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace gchr::env {

/// Finite goal-conditioned MDP. Goals are the integer ids produced by phi;
/// S_g = { s : phi(s) = g }. With absorbing_goals set, every state of S_g
/// self-loops when the evaluated goal is g.
class TabularGCMDP {
 public:
  TabularGCMDP() = default;
  /// `transitions` is laid out [s][a][s'] (n_states * n_actions rows of
  /// length n_states). Validates every row and the phi table.
  TabularGCMDP(int n_states, int n_actions, std::vector<double> transitions, std::vector<int> phi,
               double gamma, bool absorbing_goals = true);

  int n_states() const { return n_states_; }
  int n_actions() const { return n_actions_; }
  int n_goals() const { return static_cast<int>(goal_sets_.size()); }
  double gamma() const { return gamma_; }
  bool absorbing_goals() const { return absorbing_goals_; }

  int phi(int s) const { return phi_.at(s); }
  const std::vector<int>& phi_table() const { return phi_; }
  const std::vector<int>& goal_set(int g) const { return goal_sets_.at(g); }
  bool in_goal_set(int s, int g) const { return phi_.at(s) == g; }

  /// Raw transition probability, ignoring the absorbing override.
  double p(int s, int a, int next) const {
    return transitions_[(static_cast<std::size_t>(s) * n_actions_ + a) * n_states_ + next];
  }
  const double* row(int s, int a) const {
    return transitions_.data() + (static_cast<std::size_t>(s) * n_actions_ + a) * n_states_;
  }
  const std::vector<double>& transitions() const { return transitions_; }

 private:
  int n_states_ = 0;
  int n_actions_ = 0;
  std::vector<double> transitions_;
  std::vector<int> phi_;
  std::vector<std::vector<int>> goal_sets_;
  double gamma_ = 0.0;
  bool absorbing_goals_ = true;
};

/// Next-state distribution for (s, a) while pursuing `goal`: a point mass on
/// s when goals are absorbing and phi(s) = goal, otherwise the raw row.
std::vector<double> tabular_step_distribution(const TabularGCMDP& mdp, int s, int a, int goal);

// Plain-text format (see docs/tabular_format.md):
//   gcmdp <n_states> <n_actions> <gamma> <absorbing 0|1>
//   phi <phi(0)> ... <phi(n_states-1)>
//   <s> <a> <p(0)> ... <p(n_states-1)>      one line per (s, a) pair
// '#' starts a comment that runs to end of line.
TabularGCMDP parse_tabular_gcmdp(std::istream& in);
TabularGCMDP load_tabular_gcmdp(const std::filesystem::path& path);
void write_tabular_gcmdp(std::ostream& out, const TabularGCMDP& mdp);

}  // namespace gchr::env
