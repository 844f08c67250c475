#include "gchr/tabular/coverage.hpp"

#include <algorithm>
#include <limits>

#include "gchr/errors.hpp"

namespace gchr::tabular {

std::vector<LoggedTrajectory> generate_random_log(const env::TabularGCMDP& mdp, int episodes,
                                                  int horizon, Rng& rng) {
  require(episodes >= 1 && horizon >= 1, "generate_random_log: counts must be positive");
  std::uniform_int_distribution<int> pick_state(0, mdp.n_states() - 1);
  std::uniform_int_distribution<int> pick_action(0, mdp.n_actions() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<LoggedTrajectory> log(episodes);
  for (auto& ep : log) {
    int s = pick_state(rng);
    ep.states.push_back(s);
    for (int t = 0; t < horizon; ++t) {
      const int a = pick_action(rng);
      const double* row = mdp.row(s, a);
      double u = unit(rng);
      int next = mdp.n_states() - 1;
      for (int k = 0; k < mdp.n_states(); ++k) {
        u -= row[k];
        if (u < 0.0) {
          next = k;
          break;
        }
      }
      ep.actions.push_back(a);
      ep.states.push_back(next);
      s = next;
    }
  }
  return log;
}

namespace {

void check_log(const env::TabularGCMDP& mdp, const std::vector<LoggedTrajectory>& log) {
  for (const auto& ep : log) {
    require(ep.states.size() == ep.actions.size() + 1, "coverage: malformed logged trajectory");
    for (int s : ep.states) require(s >= 0 && s < mdp.n_states(), "coverage: state out of range");
    for (int a : ep.actions)
      require(a >= 0 && a < mdp.n_actions(), "coverage: action out of range");
  }
}

// Calls fn(s_t, a_t, g) once per distinct goal reached at some t' > t.
template <class Fn>
void for_each_hindsight_tuple(const env::TabularGCMDP& mdp, const LoggedTrajectory& ep, Fn fn) {
  std::vector<char> later(mdp.n_goals(), 0);
  for (int t = static_cast<int>(ep.actions.size()) - 1; t >= 0; --t) {
    later[mdp.phi(ep.states[t + 1])] = 1;
    for (int g = 0; g < mdp.n_goals(); ++g)
      if (later[g]) fn(ep.states[t], ep.actions[t], g);
  }
}

}  // namespace

BehaviorCloningFit fit_behavior_cloning(const env::TabularGCMDP& mdp,
                                        const std::vector<LoggedTrajectory>& log,
                                        double smoothing) {
  require(smoothing > 0.0, "fit_behavior_cloning: smoothing must be positive");
  check_log(mdp, log);
  const int ns = mdp.n_states(), ng = mdp.n_goals(), na = mdp.n_actions();
  std::vector<double> counts(static_cast<std::size_t>(ns) * ng * na, 0.0);
  for (const auto& ep : log) {
    for_each_hindsight_tuple(mdp, ep, [&](int s, int a, int g) {
      counts[(static_cast<std::size_t>(s) * ng + g) * na + a] += 1.0;
    });
  }
  BehaviorCloningFit fit{TabularPolicy(ns, ng, na), std::vector<char>(ns * ng, 0)};
  for (int s = 0; s < ns; ++s) {
    for (int g = 0; g < ng; ++g) {
      const double* c = &counts[(static_cast<std::size_t>(s) * ng + g) * na];
      double total = 0.0;
      for (int a = 0; a < na; ++a) total += c[a] + smoothing;
      for (int a = 0; a < na; ++a) fit.policy.prob(s, g, a) = (c[a] + smoothing) / total;
      fit.observed[s * ng + g] = total > na * smoothing ? 1 : 0;
    }
  }
  return fit;
}

CoverageIndex::CoverageIndex(const env::TabularGCMDP& mdp,
                             const std::vector<LoggedTrajectory>& log)
    : n_states_(mdp.n_states()), n_goals_(mdp.n_goals()), n_actions_(mdp.n_actions()) {
  check_log(mdp, log);
  hsr_.assign(static_cast<std::size_t>(n_states_) * n_goals_ * n_actions_, 0);
  std::vector<char> logged(n_goals_, 0);
  std::vector<char> reached(static_cast<std::size_t>(n_states_) * n_goals_, 0);
  for (const auto& ep : log) {
    for (int s : ep.states) logged[mdp.phi(s)] = 1;
    for_each_hindsight_tuple(mdp, ep, [&](int s, int a, int g) {
      hsr_[index(s, g, a)] = 1;
      reached[static_cast<std::size_t>(s) * n_goals_ + g] = 1;
    });
  }
  for (int g = 0; g < n_goals_; ++g)
    if (logged[g]) logged_goals_.push_back(g);
  reached_from_.resize(n_states_);
  for (int s = 0; s < n_states_; ++s)
    for (int g = 0; g < n_goals_; ++g)
      if (reached[static_cast<std::size_t>(s) * n_goals_ + g]) reached_from_[s].push_back(g);
}

ActionSupports action_supports(const CoverageIndex& index, const TabularPolicy& prior, int s,
                               int g, double threshold, HgrUnion over) {
  require(s >= 0 && s < index.n_states() && g >= 0 && g < index.n_goals(),
          "action_supports: index out of range");
  require(prior.n_states() == index.n_states() && prior.n_goals() == index.n_goals() &&
              prior.n_actions() == index.n_actions(),
          "action_supports: prior shape does not match");
  ActionSupports out;
  for (int a = 0; a < index.n_actions(); ++a)
    if (index.hsr_action(s, g, a)) out.hsr.push_back(a);

  const auto& goals =
      over == HgrUnion::AllLoggedGoals ? index.logged_goals() : index.goals_reached_from(s);
  for (int a = 0; a < index.n_actions(); ++a) {
    for (int gp : goals) {
      if (prior.prob(s, gp, a) > threshold) {
        out.hgr.push_back(a);
        break;
      }
    }
  }
  return out;
}

ActionSupports action_supports(const std::vector<LoggedTrajectory>& log,
                               const env::TabularGCMDP& mdp, const TabularPolicy& prior, int s,
                               int g, double threshold) {
  return action_supports(CoverageIndex(mdp, log), prior, s, g, threshold);
}

CoverageReport check_action_coverage(const env::TabularGCMDP& mdp,
                                     const std::vector<LoggedTrajectory>& log,
                                     const TabularPolicy& prior, double threshold, HgrUnion over) {
  const CoverageIndex index(mdp, log);
  CoverageReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < mdp.n_states(); ++s) {
    if (!index.visited(s)) continue;
    for (int g = 0; g < mdp.n_goals(); ++g) {
      if (mdp.goal_set(g).empty()) continue;
      const auto sup = action_supports(index, prior, s, g, threshold, over);
      ++report.pairs;
      if (sup.hsr.empty()) {
        if (!sup.hgr.empty()) ++report.empty_hsr_nonempty_hgr;
        continue;
      }
      ++report.nonempty_hsr;
      const bool contained = std::ranges::all_of(sup.hsr, [&](int a) {
        return std::ranges::find(sup.hgr, a) != sup.hgr.end();
      });
      if (!contained) ++report.violations;
      for (int a : sup.hsr)
        report.min_margin = std::min(report.min_margin, prior.prob(s, g, a) - threshold);
    }
  }
  return report;
}

}  // namespace gchr::tabular
