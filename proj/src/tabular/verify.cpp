#include "gchr/tabular/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "gchr/errors.hpp"
#include "gchr/tabular/coverage.hpp"
#include "gchr/tabular/theorems.hpp"

namespace gchr::tabular {

Matrix evaluate_q_iterative(const env::TabularGCMDP& mdp, const TabularPolicy& policy, int goal,
                            double tolerance, int max_sweeps) {
  policy.require_compatible(mdp);
  const int n = mdp.n_states(), na = mdp.n_actions();
  Matrix q = Matrix::Zero(n, na);
  Vector v = Vector::Zero(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    Matrix next(n, na);
    for (int s = 0; s < n; ++s) {
      const double r = mdp.phi(s) == goal ? 1.0 : 0.0;
      for (int a = 0; a < na; ++a) {
        const auto row = env::tabular_step_distribution(mdp, s, a, goal);
        double expect = 0.0;
        for (int k = 0; k < n; ++k) expect += row[k] * v(k);
        next(s, a) = r + mdp.gamma() * expect;
      }
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = next;
    for (int s = 0; s < n; ++s) {
      v(s) = 0.0;
      for (int a = 0; a < na; ++a) v(s) += policy.prob(s, goal, a) * q(s, a);
    }
    if (change < tolerance) return q;
  }
  throw NumericError("evaluate_q_iterative: no convergence");
}

bool VerifyReport::all_pass() const {
  return std::ranges::all_of(margins, [](const CheckMargin& m) { return m.pass; });
}

namespace {

CheckMargin upper_bound_check(std::string name, int goal, double value, double bound) {
  return {std::move(name), goal, value, bound, bound - value, value <= bound};
}

CheckMargin lower_bound_check(std::string name, int goal, double value, double bound) {
  return {std::move(name), goal, value, bound, value - bound, value >= bound};
}

}  // namespace

VerifyReport verify_tabular_mdp(const env::TabularGCMDP& mdp, const VerifyOptions& options) {
  VerifyReport report;
  const auto uniform = TabularPolicy::uniform(mdp);

  for (int g = 0; g < mdp.n_goals(); ++g) {
    if (mdp.goal_set(g).empty()) continue;
    const auto table = compute_occupancy(mdp, uniform, g);
    double row_err = (table.d_action.rowwise().sum().array() - 1.0).abs().maxCoeff();
    row_err = std::max(row_err, (table.d_marginal.rowwise().sum().array() - 1.0).abs().maxCoeff());
    report.margins.push_back(upper_bound_check("occupancy_normalization", g, row_err, options.tolerance));

    const Matrix q_iter = evaluate_q_iterative(mdp, uniform, g);
    double q_err = 0.0;
    for (int s = 0; s < mdp.n_states(); ++s)
      for (int a = 0; a < mdp.n_actions(); ++a)
        q_err = std::max(q_err, std::abs(q_from_occupancy(table, s, a) - q_iter(s, a)));
    report.margins.push_back(upper_bound_check("q_identity", g, q_err, options.tolerance));

    double hit_err = 0.0;
    for (int s = 0; s < mdp.n_states(); ++s) {
      if (table.hit_mass(s) <= 0.0) continue;
      hit_err = std::max(hit_err, std::abs(table.first_hit.row(s).sum() - 1.0));
    }
    report.margins.push_back(upper_bound_check("first_hit_normalization", g, hit_err, options.tolerance));
  }

  const auto cert = check_assumption_uniform_reachability(mdp, uniform, options.delta);
  report.margins.push_back(
      upper_bound_check("assumption_spread_uniform_policy", -1, cert.max_spread, options.delta));
  report.margins.back().pass = cert.holds;
  for (const auto& w : cert.witnesses) {
    if (w.part == 1)
      report.notes.push_back("assumption part 1: state " + std::to_string(w.from) +
                             " cannot reach state " + std::to_string(w.to) + " inside goal set " +
                             std::to_string(w.goal));
    else
      report.notes.push_back("assumption part 2: V(., " + std::to_string(w.other_goal) +
                             ") spreads by " + std::to_string(w.spread) + " over goal set " +
                             std::to_string(w.goal));
  }

  const auto thm2 = check_theorem2_monotonicity(mdp, options.policy_iterations, {}, options.delta);
  const double tol = options.tolerance;
  report.margins.push_back(lower_bound_check("policy_iteration_value_diff", -1, thm2.min_value_diff, -tol));
  report.margins.push_back(lower_bound_check("via_goal_value_diff", -1, thm2.min_via_diff, -tol));
  report.margins.push_back(lower_bound_check("hit_probability_diff", -1, thm2.min_hit_diff, -tol));
  report.margins.push_back(lower_bound_check("downstream_value_diff", -1, thm2.min_downstream_diff, -tol));
  report.margins.push_back(
      lower_bound_check("averaged_via_goal_value_diff", -1, thm2.min_averaged_via_diff, -tol));
  if (!thm2.assumption_holds)
    report.notes.push_back("uniform reachability fails on some policy iterate (max spread " +
                           std::to_string(thm2.assumption_max_spread) +
                           "); via-goal monotonicity is not implied");

  Rng rng(options.seed);
  const auto log = generate_random_log(mdp, options.log_episodes, options.log_horizon, rng);
  const auto fit = fit_behavior_cloning(mdp, log);
  for (auto over : {HgrUnion::AllLoggedGoals, HgrUnion::ReachedFromState}) {
    const auto cov = check_action_coverage(mdp, log, fit.policy, options.support_threshold, over);
    const std::string name = over == HgrUnion::AllLoggedGoals ? "coverage_all_logged_goals"
                                                              : "coverage_goals_reached_from_state";
    report.margins.push_back(upper_bound_check(name + "_violations", -1, cov.violations, 0.0));
    report.notes.push_back(name + ": " + std::to_string(cov.pairs) + " pairs, " +
                           std::to_string(cov.nonempty_hsr) + " with HSR support, " +
                           std::to_string(cov.empty_hsr_nonempty_hgr) +
                           " with empty HSR and non-empty HGR support");
  }
  return report;
}

void write_verify_text(std::ostream& out, const env::TabularGCMDP& mdp, const VerifyReport& report) {
  out << "tabular verification: " << mdp.n_states() << " states, " << mdp.n_actions()
      << " actions, " << mdp.n_goals() << " goals, gamma " << mdp.gamma() << "\n";
  for (const auto& m : report.margins) {
    out << (m.pass ? "ok   " : "FAIL ") << m.check;
    if (m.goal >= 0) out << " goal=" << m.goal;
    out << " value=" << std::setprecision(6) << m.value << " threshold=" << m.threshold << "\n";
  }
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  out << (report.all_pass() ? "all checks passed" : "some checks failed") << "\n";
}

void write_verify_csv(std::ostream& out, const VerifyReport& report) {
  out << "check,goal,value,threshold,margin,pass\n";
  out << std::setprecision(17);
  for (const auto& m : report.margins)
    out << m.check << ',' << m.goal << ',' << m.value << ',' << m.threshold << ',' << m.margin
        << ',' << (m.pass ? 1 : 0) << "\n";
}

}  // namespace gchr::tabular
