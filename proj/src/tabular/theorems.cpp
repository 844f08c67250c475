#include "gchr/tabular/theorems.hpp"

#include <algorithm>
#include <limits>

#include "gchr/errors.hpp"

namespace gchr::tabular {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Breadth-first reachability from `start` using nonzero raw transitions that
// stay inside the goal set.
std::vector<char> reachable_inside(const env::TabularGCMDP& mdp, int goal, int start) {
  std::vector<char> seen(mdp.n_states(), 0);
  std::vector<int> frontier{start};
  seen[start] = 1;
  while (!frontier.empty()) {
    const int s = frontier.back();
    frontier.pop_back();
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double* row = mdp.row(s, a);
      for (int k = 0; k < mdp.n_states(); ++k) {
        if (row[k] > 0.0 && !seen[k] && mdp.phi(k) == goal) {
          seen[k] = 1;
          frontier.push_back(k);
        }
      }
    }
  }
  return seen;
}

void check_goal(const env::TabularGCMDP& mdp, const std::vector<Vector>& values, int goal,
                double delta, ReachabilityCertificate& cert) {
  const auto& set = mdp.goal_set(goal);
  for (int s : set) {
    const auto seen = reachable_inside(mdp, goal, s);
    for (int t : set) {
      if (seen[t]) continue;
      cert.connectivity_holds = false;
      cert.witnesses.push_back({.part = 1, .goal = goal, .from = s, .to = t});
    }
  }
  for (int other = 0; other < mdp.n_goals(); ++other) {
    if (other == goal || set.empty()) continue;
    const Vector& v = values[other];
    if (!(v.maxCoeff() > 0.0)) continue;
    double lo = kInf, hi = -kInf;
    for (int s : set) {
      lo = std::min(lo, v(s));
      hi = std::max(hi, v(s));
    }
    const double spread = hi - lo;
    cert.max_spread = std::max(cert.max_spread, spread);
    if (spread >= delta) {
      cert.spread_holds = false;
      cert.witnesses.push_back({.part = 2, .goal = goal, .other_goal = other, .spread = spread});
    }
  }
  cert.holds = cert.connectivity_holds && cert.spread_holds;
}

std::vector<Vector> all_values(const env::TabularGCMDP& mdp, const TabularPolicy& policy) {
  std::vector<Vector> values;
  for (const auto& t : compute_all_occupancies(mdp, policy)) values.push_back(values_from_occupancy(t));
  return values;
}

}  // namespace

ReachabilityCertificate check_assumption_uniform_reachability(const env::TabularGCMDP& mdp,
                                                              const TabularPolicy& policy,
                                                              int goal, double delta) {
  require(goal >= 0 && goal < mdp.n_goals(), "check_assumption: goal out of range");
  require(delta > 0.0, "check_assumption: delta must be positive");
  ReachabilityCertificate cert;
  check_goal(mdp, all_values(mdp, policy), goal, delta, cert);
  return cert;
}

ReachabilityCertificate check_assumption_uniform_reachability(const env::TabularGCMDP& mdp,
                                                              const TabularPolicy& policy,
                                                              double delta) {
  require(delta > 0.0, "check_assumption: delta must be positive");
  ReachabilityCertificate cert;
  const auto values = all_values(mdp, policy);
  for (int g = 0; g < mdp.n_goals(); ++g) check_goal(mdp, values, g, delta, cert);
  return cert;
}

TabularPolicy greedy_policy(const env::TabularGCMDP& mdp, const std::vector<Vector>& values,
                            const TabularPolicy* current, double tie_tolerance) {
  require(static_cast<int>(values.size()) == mdp.n_goals(), "greedy_policy: need one value per goal");
  TabularPolicy out(mdp.n_states(), mdp.n_goals(), mdp.n_actions());
  std::vector<double> q(mdp.n_actions());
  for (int g = 0; g < mdp.n_goals(); ++g) {
    for (int s = 0; s < mdp.n_states(); ++s) {
      for (int a = 0; a < mdp.n_actions(); ++a) {
        const auto row = env::tabular_step_distribution(mdp, s, a, g);
        q[a] = Eigen::Map<const Vector>(row.data(), mdp.n_states()).dot(values[g]);
      }
      const double best = *std::max_element(q.begin(), q.end());
      int choice = -1;
      if (current != nullptr) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
          if (current->prob(s, g, a) == 1.0 && q[a] >= best - tie_tolerance) choice = a;
        }
      }
      if (choice < 0) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
          if (q[a] >= best - tie_tolerance) {
            choice = a;
            break;
          }
        }
      }
      out.set_deterministic(s, g, choice);
    }
  }
  return out;
}

std::vector<TabularPolicy> policy_iteration(const env::TabularGCMDP& mdp, TabularPolicy start,
                                            int count, double tie_tolerance) {
  require(count >= 1, "policy_iteration: need at least one policy");
  start.require_compatible(mdp);
  std::vector<TabularPolicy> seq{std::move(start)};
  while (static_cast<int>(seq.size()) < count) {
    const auto values = all_values(mdp, seq.back());
    seq.push_back(greedy_policy(mdp, values, &seq.back(), tie_tolerance));
  }
  return seq;
}

namespace {

struct ViaSnapshot {
  std::vector<Vector> values;  // per goal
  std::vector<OccupancyTable> tables;
};

}  // namespace

Theorem2Report check_theorem2_monotonicity(const env::TabularGCMDP& mdp, int iterations,
                                           const std::vector<double>& subgoal_weights,
                                           double delta) {
  require(iterations >= 1, "check_theorem2_monotonicity: need at least one iteration");
  const int ns = mdp.n_states(), ng = mdp.n_goals();
  std::vector<double> mu = subgoal_weights;
  if (mu.empty()) {
    mu.assign(ng, 0.0);
    int nonempty = 0;
    for (int g = 0; g < ng; ++g) nonempty += mdp.goal_set(g).empty() ? 0 : 1;
    for (int g = 0; g < ng; ++g) mu[g] = mdp.goal_set(g).empty() ? 0.0 : 1.0 / nonempty;
  }
  require(static_cast<int>(mu.size()) == ng, "check_theorem2_monotonicity: weights need one entry per goal");

  const auto policies = policy_iteration(mdp, TabularPolicy::uniform(mdp), iterations);
  Theorem2Report report;
  report.iterations = iterations;
  report.min_value_diff = report.min_via_diff = report.min_hit_diff = kInf;
  report.min_downstream_diff = report.min_averaged_via_diff = kInf;

  std::vector<ViaSnapshot> snaps;
  for (const auto& pi : policies) {
    ViaSnapshot snap;
    snap.tables = compute_all_occupancies(mdp, pi);
    for (const auto& t : snap.tables) snap.values.push_back(values_from_occupancy(t));
    ReachabilityCertificate cert;
    for (int g = 0; g < ng; ++g) check_goal(mdp, snap.values, g, delta, cert);
    report.assumption_holds = report.assumption_holds && cert.holds;
    report.assumption_max_spread = std::max(report.assumption_max_spread, cert.max_spread);
    snaps.push_back(std::move(snap));
  }

  for (int k = 1; k < iterations; ++k) {
    const auto& prev = snaps[k - 1];
    const auto& cur = snaps[k];
    Theorem2Step step;
    step.iteration = k;
    step.min_value_diff = step.min_via_diff = step.min_hit_diff = kInf;
    step.min_downstream_diff = step.min_averaged_via_diff = kInf;
    for (int g = 0; g < ng; ++g) {
      if (mdp.goal_set(g).empty()) continue;
      step.min_value_diff = std::min(step.min_value_diff, (cur.values[g] - prev.values[g]).minCoeff());
    }
    for (int s = 0; s < ns; ++s) {
      for (int g = 0; g < ng; ++g) {
        if (mdp.goal_set(g).empty()) continue;
        double avg_prev = 0.0, avg_cur = 0.0;
        for (int gp = 0; gp < ng; ++gp) {
          if (mdp.goal_set(gp).empty()) continue;
          const auto a = via_goal_value(prev.tables[gp], prev.tables[g], s);
          const auto b = via_goal_value(cur.tables[gp], cur.tables[g], s);
          step.min_via_diff = std::min(step.min_via_diff, b.value - a.value);
          step.min_hit_diff = std::min(step.min_hit_diff, b.hit_probability - a.hit_probability);
          step.min_downstream_diff = std::min(step.min_downstream_diff, b.downstream - a.downstream);
          avg_prev += mu[gp] * a.value;
          avg_cur += mu[gp] * b.value;
        }
        step.min_averaged_via_diff = std::min(step.min_averaged_via_diff, avg_cur - avg_prev);
      }
    }
    report.min_value_diff = std::min(report.min_value_diff, step.min_value_diff);
    report.min_via_diff = std::min(report.min_via_diff, step.min_via_diff);
    report.min_hit_diff = std::min(report.min_hit_diff, step.min_hit_diff);
    report.min_downstream_diff = std::min(report.min_downstream_diff, step.min_downstream_diff);
    report.min_averaged_via_diff = std::min(report.min_averaged_via_diff, step.min_averaged_via_diff);
    report.steps.push_back(step);
  }
  if (iterations == 1) {
    report.min_value_diff = report.min_via_diff = report.min_hit_diff = 0.0;
    report.min_downstream_diff = report.min_averaged_via_diff = 0.0;
  }
  return report;
}

}  // namespace gchr::tabular
