#pragma once

#include <string>
#include <vector>

#include "gchr/env/tabular_mdp.hpp"
#include "gchr/tabular/occupancy.hpp"
#include "gchr/tabular/policy.hpp"

namespace gchr::tabular {

struct ReachabilityWitness {
  int part = 1;       // 1: connectivity inside S_goal, 2: value spread
  int goal = 0;       // g whose goal set is examined
  int other_goal = -1;  // g' (part 2)
  int from = -1;      // part 1: s that cannot reach `to` inside S_g
  int to = -1;
  double spread = 0.0;  // part 2: max - min of V(., g') over S_g
};

struct ReachabilityCertificate {
  bool holds = true;
  bool connectivity_holds = true;
  bool spread_holds = true;
  double max_spread = 0.0;
  std::vector<ReachabilityWitness> witnesses;
};

/// Uniform-reachability check for one goal set S_goal:
///  1. every state of S_goal reaches every other through nonzero raw
///     transitions that stay inside S_goal;
///  2. for every g' != goal with V(s, g') > 0 somewhere, the spread of
///     V(., g') over S_goal is below delta.
ReachabilityCertificate check_assumption_uniform_reachability(const env::TabularGCMDP& mdp,
                                                              const TabularPolicy& policy,
                                                              int goal, double delta);
/// Same check over every non-empty goal set.
ReachabilityCertificate check_assumption_uniform_reachability(const env::TabularGCMDP& mdp,
                                                              const TabularPolicy& policy,
                                                              double delta);

/// Deterministic greedy policy against V(., g) for every goal. Actions
/// within `tie_tolerance` of the best keep the current choice of `current`
/// when it is among them, otherwise the lowest index wins.
TabularPolicy greedy_policy(const env::TabularGCMDP& mdp, const std::vector<Vector>& values,
                            const TabularPolicy* current, double tie_tolerance = 1e-12);

/// pi(0) = start, pi(k) = greedy(V^{pi(k-1)}). Returns `count` policies.
std::vector<TabularPolicy> policy_iteration(const env::TabularGCMDP& mdp, TabularPolicy start,
                                            int count, double tie_tolerance = 1e-12);

struct Theorem2Step {
  int iteration = 0;  // compares pi(iteration) against pi(iteration - 1)
  double min_value_diff = 0.0;
  double min_via_diff = 0.0;
  double min_hit_diff = 0.0;
  double min_downstream_diff = 0.0;
  double min_averaged_via_diff = 0.0;
};

struct Theorem2Report {
  int iterations = 0;
  bool assumption_holds = true;
  double assumption_max_spread = 0.0;
  /// Minima over all steps and all (s, g, g').
  double min_value_diff = 0.0;
  double min_via_diff = 0.0;
  double min_hit_diff = 0.0;
  double min_downstream_diff = 0.0;
  double min_averaged_via_diff = 0.0;
  std::vector<Theorem2Step> steps;

  bool monotone(double tolerance) const {
    return min_via_diff >= -tolerance && min_hit_diff >= -tolerance &&
           min_downstream_diff >= -tolerance && min_averaged_via_diff >= -tolerance;
  }
};

/// Runs exact policy iteration from the uniform policy and compares
/// V_via(s, g; g') between consecutive iterates for every triple, together
/// with its two factors. `subgoal_weights` is the averaging distribution over
/// g' (uniform over non-empty goals when empty). The uniform-reachability
/// certificate is evaluated on every iterate with `delta`.
Theorem2Report check_theorem2_monotonicity(const env::TabularGCMDP& mdp, int iterations,
                                           const std::vector<double>& subgoal_weights = {},
                                           double delta = 1e-9);

}  // namespace gchr::tabular
