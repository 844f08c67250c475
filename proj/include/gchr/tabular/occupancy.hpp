#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gchr/env/tabular_mdp.hpp"
#include "gchr/tabular/policy.hpp"

namespace gchr::tabular {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Discounted occupancies of a policy pursuing one goal g in the absorbing
/// formulation. The sums start at the current step, so every row is a
/// distribution and d(. | s) puts weight (1 - gamma) on s itself:
///   d(s' | s, g)    = (1 - gamma) sum_{t >= 0} gamma^t Pr(s_t = s' | s_0 = s)
///   d(s' | s, a, g) = (1 - gamma) [ 1{s' = s} + gamma P_g(. | s, a) N ]
/// with N = (I - gamma P_pi)^-1.
struct OccupancyTable {
  int goal = 0;
  int n_states = 0;
  int n_actions = 0;
  double gamma = 0.0;

  Matrix d_marginal;  // n_states x n_states, row s
  Matrix d_action;    // (n_states * n_actions) x n_states, row s * n_actions + a
  Vector p_goal;              // p(g | s, g)
  Vector p_goal_action;       // p(g | s, a, g), index s * n_actions + a
  /// Normalized discounted first-passage distribution over S_g. Rows with no
  /// hitting mass are zero.
  Matrix first_hit;
  /// Unnormalized discounted first-passage mass sum_t gamma^t Pr(T_hit = t).
  Vector hit_mass;

  double d(int next, int s, int a) const { return d_action(s * n_actions + a, next); }
  double p(int s, int a) const { return p_goal_action(s * n_actions + a); }
};

/// Next-state matrix of pi(. | ., g) under the absorbing override for g.
Matrix policy_transition_matrix(const env::TabularGCMDP& mdp, const TabularPolicy& policy,
                                int goal);

/// Direct dense solve of the discounted visitation system (partial pivoting).
OccupancyTable compute_occupancy(const env::TabularGCMDP& mdp, const TabularPolicy& policy,
                                 int goal);

/// Q(s, a, g) = p(g | s, a, g) / (1 - gamma).
double q_from_occupancy(const OccupancyTable& table, int s, int a);
/// V(s, g) = p(g | s, g) / (1 - gamma).
double v_from_occupancy(const OccupancyTable& table, int s);
Vector values_from_occupancy(const OccupancyTable& table);

/// First-passage distribution over S_goal for a policy pursuing `goal`:
/// transitions leaving the complement of S_goal are removed and the taboo
/// system (I - gamma P_TT) h = gamma P_TS solved. States already in S_goal
/// hit themselves.
void first_hit_distribution(const env::TabularGCMDP& mdp, const Matrix& policy_transitions,
                            int goal, Matrix& first_hit, Vector& hit_mass);

struct ViaGoalValue {
  double hit_probability = 0.0;  // p(g' | s)
  double downstream = 0.0;       // sum_{s' in S_g'} first_hit(s' | s, g') V(s', g)
  double value = 0.0;            // product of the two
};

/// Value of reaching g by first reaching g': the policy pursues g' until it
/// enters S_g', then pursues g. Zero when g' is unreachable from s.
ViaGoalValue via_goal_value(const OccupancyTable& to_subgoal, const OccupancyTable& to_goal, int s);
ViaGoalValue via_goal_value(const env::TabularGCMDP& mdp, const TabularPolicy& policy, int s,
                            int goal, int subgoal);

/// Occupancy tables for every goal of the MDP.
std::vector<OccupancyTable> compute_all_occupancies(const env::TabularGCMDP& mdp,
                                                    const TabularPolicy& policy);

}  // namespace gchr::tabular
