#pragma once

#include <random>
#include <vector>

#include "gchr/env/tabular_mdp.hpp"
#include "gchr/tabular/policy.hpp"

namespace gchr::tabular {

using Rng = std::mt19937_64;

/// Logged episode on a tabular MDP: states s_0..s_T and actions a_0..a_{T-1}.
struct LoggedTrajectory {
  std::vector<int> states;
  std::vector<int> actions;
};

/// Episodes under uniformly random actions from uniformly random starts,
/// following the raw transitions (no absorbing override).
std::vector<LoggedTrajectory> generate_random_log(const env::TabularGCMDP& mdp, int episodes,
                                                  int horizon, Rng& rng);

struct BehaviorCloningFit {
  TabularPolicy policy;
  /// observed[s * n_goals + g] is 1 when some logged (s, a) later reached g.
  std::vector<char> observed;
};

/// Count-based behaviour cloning on hindsight tuples (s_t, a_t, phi(s_t'))
/// with t' > t, plus additive smoothing. Pairs with no data come out uniform.
BehaviorCloningFit fit_behavior_cloning(const env::TabularGCMDP& mdp,
                                        const std::vector<LoggedTrajectory>& log,
                                        double smoothing = 1e-8);

/// Precomputed view of a log for support queries.
class CoverageIndex {
 public:
  CoverageIndex(const env::TabularGCMDP& mdp, const std::vector<LoggedTrajectory>& log);

  /// Actions taken at s in some episode that later reached g.
  bool hsr_action(int s, int g, int a) const { return hsr_[index(s, g, a)] != 0; }
  /// Goals achieved anywhere in the log.
  const std::vector<int>& logged_goals() const { return logged_goals_; }
  /// Goals reached after some visit to s.
  const std::vector<int>& goals_reached_from(int s) const { return reached_from_[s]; }
  bool visited(int s) const { return !reached_from_[s].empty(); }

  int n_states() const { return n_states_; }
  int n_goals() const { return n_goals_; }
  int n_actions() const { return n_actions_; }

 private:
  std::size_t index(int s, int g, int a) const {
    return (static_cast<std::size_t>(s) * n_goals_ + g) * n_actions_ + a;
  }

  int n_states_;
  int n_goals_;
  int n_actions_;
  std::vector<char> hsr_;
  std::vector<int> logged_goals_;
  std::vector<std::vector<int>> reached_from_;
};

enum class HgrUnion {
  AllLoggedGoals,  // every goal achieved anywhere in the log
  ReachedFromState // only goals reached after visiting s
};

struct ActionSupports {
  std::vector<int> hsr;
  std::vector<int> hgr;
};

/// A_HSR(s, g) and A_HGR(s, g) = union over g' of { a : prior(a | s, g') > threshold }.
ActionSupports action_supports(const CoverageIndex& index, const TabularPolicy& prior, int s,
                               int g, double threshold, HgrUnion over = HgrUnion::AllLoggedGoals);
ActionSupports action_supports(const std::vector<LoggedTrajectory>& log,
                               const env::TabularGCMDP& mdp, const TabularPolicy& prior, int s,
                               int g, double threshold);

struct CoverageReport {
  int pairs = 0;                 // (s, g) pairs queried: visited s, every goal g
  int violations = 0;            // A_HSR not contained in A_HGR
  int empty_hsr_nonempty_hgr = 0;
  int nonempty_hsr = 0;
  /// min over HSR actions of prior(a | s, g) - threshold; +inf when none.
  double min_margin = 0.0;
};

/// Checks A_HSR subset of A_HGR on every visited state and every goal.
CoverageReport check_action_coverage(const env::TabularGCMDP& mdp,
                                     const std::vector<LoggedTrajectory>& log,
                                     const TabularPolicy& prior, double threshold, HgrUnion over);

}  // namespace gchr::tabular
