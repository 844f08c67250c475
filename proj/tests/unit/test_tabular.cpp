#include <cmath>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "gchr/errors.hpp"
#include "gchr/tabular/coverage.hpp"
#include "gchr/tabular/fixtures.hpp"
#include "gchr/tabular/occupancy.hpp"
#include "gchr/tabular/theorems.hpp"
#include "gchr/tabular/verify.hpp"

using namespace gchr;
using namespace gchr::tabular;
using env::TabularGCMDP;

namespace {

TabularPolicy random_policy(const TabularGCMDP& mdp, std::mt19937_64& rng) {
  TabularPolicy pi(mdp.n_states(), mdp.n_goals(), mdp.n_actions());
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int s = 0; s < mdp.n_states(); ++s)
    for (int g = 0; g < mdp.n_goals(); ++g) {
      double total = 0.0;
      for (int a = 0; a < mdp.n_actions(); ++a) total += (pi.prob(s, g, a) = u(rng));
      for (int a = 0; a < mdp.n_actions(); ++a) pi.prob(s, g, a) /= total;
    }
  return pi;
}

// V(., g) by fixed-point iteration on V = r + gamma P_pi V under the
// absorbing override, then Q = r + gamma P V.
std::vector<std::vector<double>> value_iteration_q(const TabularGCMDP& mdp, const TabularPolicy& pi, int g) {
  const int n = mdp.n_states(), na = mdp.n_actions();
  std::vector<double> v(n, 0.0), next(n);
  auto backup = [&](int s, int a, const std::vector<double>& vals) {
    const auto row = env::tabular_step_distribution(mdp, s, a, g);
    double acc = mdp.in_goal_set(s, g) ? 1.0 : 0.0;
    for (int k = 0; k < n; ++k) acc += mdp.gamma() * row[k] * vals[k];
    return acc;
  };
  for (int sweep = 0; sweep < 100000; ++sweep) {
    double change = 0.0;
    for (int s = 0; s < n; ++s) {
      double acc = 0.0;
      for (int a = 0; a < na; ++a) acc += pi.prob(s, g, a) * backup(s, a, v);
      next[s] = acc;
      change = std::max(change, std::abs(acc - v[s]));
    }
    v.swap(next);
    if (change < 1e-15) break;
  }
  std::vector<std::vector<double>> q(n, std::vector<double>(na));
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < na; ++a) q[s][a] = backup(s, a, v);
  return q;
}

// Greedy-toward-target move on a width x height grid, mixed with uniform.
TabularPolicy grid_homing_policy(int width, int height, double greed) {
  const int n = width * height;
  TabularPolicy pi(n, n, 4);
  for (int s = 0; s < n; ++s)
    for (int g = 0; g < n; ++g) {
      const int sx = s % width, sy = s / width, gx = g % width, gy = g / width;
      int best = 0;  // up
      if (gx > sx) best = 1;
      else if (gx < sx) best = 3;
      else if (gy < sy) best = 2;
      for (int a = 0; a < 4; ++a) pi.prob(s, g, a) = (1.0 - greed) / 4.0 + (a == best ? greed : 0.0);
    }
  return pi;
}

int sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    u -= probs[k];
    if (u <= 0.0) return static_cast<int>(k);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

TEST_SUITE("tabular") {

TEST_CASE("chain: occupancy and value by hand") {
  const auto mdp = chain3(0.5);
  const auto pi = TabularPolicy::uniform(mdp);
  const auto occ = compute_occupancy(mdp, pi, 2);
  // (1 - gamma) * gamma^2 for s2 two steps ahead, plus nothing earlier
  CHECK(occ.d_marginal(0, 2) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(occ.d_marginal(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(occ.d_marginal(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(occ.p(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(q_from_occupancy(occ, 0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  // direct discounted sum: sum_{t >= 2} 0.5^t
  double ret = 0.0;
  for (int t = 2; t < 200; ++t) ret += std::pow(0.5, t);
  CHECK(q_from_occupancy(occ, 0, 0) == doctest::Approx(ret).epsilon(1e-14));
  CHECK(v_from_occupancy(occ, 2) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("absorbing goal state keeps all of its occupancy") {
  const auto mdp = chain3(0.5);
  const auto occ = compute_occupancy(mdp, TabularPolicy::uniform(mdp), 1);
  CHECK(occ.d_marginal(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v_from_occupancy(occ, 1) == doctest::Approx(1.0 / (1.0 - 0.5)).epsilon(1e-14));
  // Counting from one step ahead instead gives the occupancy minus its
  // current-step term: gamma on the state itself.
  CHECK(occ.d_marginal(1, 1) - (1.0 - mdp.gamma()) == doctest::Approx(mdp.gamma()));
}

TEST_CASE("occupancy rows are distributions") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdp = random_absorbing_mdp(6, 3, 0.9, rng);
    const auto pi = random_policy(mdp, rng);
    for (int g = 0; g < mdp.n_goals(); ++g) {
      const auto occ = compute_occupancy(mdp, pi, g);
      for (int r = 0; r < occ.d_marginal.rows(); ++r) {
        CHECK(std::abs(occ.d_marginal.row(r).sum() - 1.0) <= 1e-12);
        CHECK(occ.d_marginal.row(r).minCoeff() >= -1e-15);
      }
      for (int r = 0; r < occ.d_action.rows(); ++r)
        CHECK(std::abs(occ.d_action.row(r).sum() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("occupancy matches a truncated power series") {
  std::mt19937_64 rng(2);
  const auto mdp = random_absorbing_mdp(7, 2, 0.8, rng);
  const auto pi = random_policy(mdp, rng);
  const int g = 0;
  const auto occ = compute_occupancy(mdp, pi, g);
  const auto P = policy_transition_matrix(mdp, pi, g);
  Matrix acc = Matrix::Zero(7, 7), term = Matrix::Identity(7, 7);
  for (int t = 0; t < 400; ++t) {
    acc += std::pow(0.8, t) * term;
    term = term * P;
  }
  acc *= 0.2;
  CHECK((acc - occ.d_marginal).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Q identity agrees with value iteration on 100 random MDPs") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const int na = 1 + trial % 3;
    const auto mdp = random_absorbing_mdp(n, na, 0.5 + 0.45 * (trial % 5) / 4.0, rng);
    const auto pi = random_policy(mdp, rng);
    for (int g = 0; g < mdp.n_goals(); ++g) {
      const auto occ = compute_occupancy(mdp, pi, g);
      const auto q = value_iteration_q(mdp, pi, g);
      const auto qi = evaluate_q_iterative(mdp, pi, g);
      for (int s = 0; s < n; ++s)
        for (int a = 0; a < na; ++a) {
          worst = std::max(worst, std::abs(q_from_occupancy(occ, s, a) - q[s][a]));
          worst = std::max(worst, std::abs(qi(s, a) - q[s][a]));
        }
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("first-hit rows live on the goal set and sum to one") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mdp = random_absorbing_mdp(6, 2, 0.9, rng);
    const auto pi = random_policy(mdp, rng);
    for (int g = 0; g < mdp.n_goals(); ++g) {
      const auto occ = compute_occupancy(mdp, pi, g);
      for (int s = 0; s < 6; ++s) {
        CHECK(occ.hit_mass(s) == doctest::Approx(occ.p_goal(s)).epsilon(1e-12));
        const double row = occ.first_hit.row(s).sum();
        if (occ.hit_mass(s) > 0.0) CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
        else CHECK(row == 0.0);
        for (int k = 0; k < 6; ++k)
          if (!mdp.in_goal_set(k, g)) CHECK(occ.first_hit(s, k) == 0.0);
        if (mdp.in_goal_set(s, g)) CHECK(occ.first_hit(s, s) == 1.0);
      }
    }
  }
}

TEST_CASE("first hits ignore states off every path to the goal set") {
  // 0 -> {1, 2}; 1, 2 absorbing goal states; 3 and 4 only feed each other.
  const std::vector<double> p = {0, 0.3, 0.7, 0, 0,  //
                                 0, 1, 0, 0, 0,      //
                                 0, 0, 1, 0, 0,      //
                                 0, 0, 0, 0.5, 0.5,  //
                                 0, 0, 0, 0.9, 0.1};
  const TabularGCMDP a(5, 1, p, {0, 1, 1, 2, 3}, 0.9);
  // swap the labels of states 3 and 4
  const std::vector<double> q = {0, 0.3, 0.7, 0, 0,  //
                                 0, 1, 0, 0, 0,      //
                                 0, 0, 1, 0, 0,      //
                                 0, 0, 0, 0.1, 0.9,  //
                                 0, 0, 0, 0.5, 0.5};
  const TabularGCMDP b(5, 1, q, {0, 1, 1, 3, 2}, 0.9);
  const auto oa = compute_occupancy(a, TabularPolicy::uniform(a), 1);
  const auto ob = compute_occupancy(b, TabularPolicy::uniform(b), 1);
  for (int s = 0; s < 3; ++s)
    for (int k = 0; k < 5; ++k) CHECK(oa.first_hit(s, k) == doctest::Approx(ob.first_hit(s, k)).epsilon(1e-15));
  CHECK(oa.first_hit(0, 1) == doctest::Approx(0.3));
  CHECK(oa.first_hit(0, 2) == doctest::Approx(0.7));
}

TEST_CASE("via-goal value with the goal as its own subgoal") {
  const auto mdp = chain3(0.5);
  const auto pi = TabularPolicy::uniform(mdp);
  // g' = g: first hit of S_g, then V(s', g) = 1 / (1 - gamma)
  const auto v = via_goal_value(mdp, pi, 0, 2, 2);
  CHECK(v.hit_probability == doctest::Approx(0.25));
  CHECK(v.downstream == doctest::Approx(2.0));
  CHECK(v.value == doctest::Approx(0.5));
  // one step from s1: gamma * V(s2, g)
  CHECK(via_goal_value(mdp, pi, 1, 2, 2).value == doctest::Approx(0.5 * 2.0));
  // s0 is unreachable from s2
  CHECK(via_goal_value(mdp, pi, 2, 2, 0).value == 0.0);
  CHECK(via_goal_value(mdp, pi, 2, 2, 0).hit_probability == 0.0);
}

TEST_CASE("via-goal value matches two-stage Monte Carlo rollouts") {
  GridSpec spec;
  spec.width = 5;
  spec.height = 5;
  spec.slip = 0.1;
  spec.gamma = 0.9;
  const auto mdp = gridworld(spec);
  const auto pi = grid_homing_policy(5, 5, 0.6);
  const int s0 = 0, subgoal = 12, goal = 24;
  const auto exact = via_goal_value(mdp, pi, s0, goal, subgoal);

  std::mt19937_64 rng(5);
  const int episodes = 100000;
  double sum = 0.0, sum_sq = 0.0;
  auto step = [&](int s, int g) {
    std::vector<double> probs(pi.row(s, g), pi.row(s, g) + 4);
    const int a = sample_index(probs, rng);
    return sample_index(env::tabular_step_distribution(mdp, s, a, g), rng);
  };
  for (int ep = 0; ep < episodes; ++ep) {
    int s = s0;
    double disc = 1.0;
    int t = 0;
    while (!mdp.in_goal_set(s, subgoal) && disc > 1e-12) {
      s = step(s, subgoal);
      disc *= spec.gamma;
      ++t;
    }
    double ret = 0.0;
    if (mdp.in_goal_set(s, subgoal)) {
      double d = 1.0;
      while (d > 1e-12) {
        if (mdp.in_goal_set(s, goal)) {
          ret += d / (1.0 - spec.gamma);
          break;
        }
        s = step(s, goal);
        d *= spec.gamma;
      }
    }
    const double x = disc * ret;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / episodes;
  const double se = std::sqrt((sum_sq / episodes - mean * mean) / (episodes - 1));
  CHECK(exact.value > 0.0);
  CHECK(std::abs(mean - exact.value) <= 3.0 * se);
}

TEST_CASE("behaviour cloning never supports unlogged pairs beyond smoothing") {
  // 3x3 grid; the log never enters cell 8.
  GridSpec spec;
  spec.width = 3;
  spec.height = 3;
  const auto mdp = gridworld(spec);
  std::vector<LoggedTrajectory> log = {{{0, 1, 2, 5}, {1, 1, 0}}, {{3, 4, 7, 6}, {1, 0, 3}}};
  const auto prior = TabularPolicy::uniform(mdp);
  for (int s = 0; s < 9; ++s) CHECK(action_supports(log, mdp, prior, s, 8, 1e-6).hsr.empty());
  const auto sup = action_supports(log, mdp, prior, 0, 5, 1e-6);
  CHECK(sup.hsr == std::vector<int>{1});
  CHECK(sup.hgr == std::vector<int>{0, 1, 2, 3});

  const auto fit = fit_behavior_cloning(mdp, log);
  fit.policy.validate();
  CHECK(fit.policy.prob(1, 5, 1) > 0.99);
  CHECK(fit.observed[1 * 9 + 5] == 1);
  CHECK(fit.observed[1 * 9 + 8] == 0);
  CHECK(fit.policy.prob(1, 8, 2) == doctest::Approx(0.25));
}

TEST_CASE("coverage: fitted prior covers every hindsight action") {
  std::mt19937_64 rng(6);
  int nonempty = 0, gap = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto mdp = random_absorbing_mdp(3 + trial % 6, 2 + trial % 3, 0.9, rng);
    const auto log = generate_random_log(mdp, 20, 6, rng);
    const auto fit = fit_behavior_cloning(mdp, log);
    for (auto over : {HgrUnion::AllLoggedGoals, HgrUnion::ReachedFromState}) {
      const auto rep = check_action_coverage(mdp, log, fit.policy, 1e-6, over);
      CHECK(rep.violations == 0);
      CHECK(rep.min_margin > 0.0);
      nonempty += rep.nonempty_hsr;
      gap += rep.empty_hsr_nonempty_hgr;
    }
  }
  CHECK(nonempty > 0);
  CHECK(gap > 0);
}

TEST_CASE("coverage: exhaustive over deterministic 3-state, 2-action MDPs") {
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int code = 0; code < 729; ++code) {
    std::vector<double> p(3 * 2 * 3, 0.0);
    int c = code;
    for (int sa = 0; sa < 6; ++sa) {
      p[sa * 3 + c % 3] = 1.0;
      c /= 3;
    }
    const TabularGCMDP mdp(3, 2, p, {0, 1, 1}, 0.9);
    const auto log = generate_random_log(mdp, 4, 4, rng);
    const auto fit = fit_behavior_cloning(mdp, log);
    const auto rep = check_action_coverage(mdp, log, fit.policy, 1e-6, HgrUnion::ReachedFromState);
    REQUIRE(rep.violations == 0);
    ++checked;
  }
  CHECK(checked == 729);
}

TEST_CASE("coverage: uniform prior makes the HGR support every action") {
  std::mt19937_64 rng(8);
  const auto mdp = random_absorbing_mdp(5, 3, 0.9, rng);
  const auto log = generate_random_log(mdp, 10, 5, rng);
  const CoverageIndex index(mdp, log);
  const auto prior = TabularPolicy::uniform(mdp);
  for (int s = 0; s < 5; ++s)
    for (int g = 0; g < mdp.n_goals(); ++g)
      CHECK(action_supports(index, prior, s, g, 1e-6).hgr.size() == 3u);
}

TEST_CASE("uniform reachability: singleton goal sets hold vacuously") {
  GridSpec spec;
  const auto mdp = gridworld(spec);
  const auto cert = check_assumption_uniform_reachability(mdp, TabularPolicy::uniform(mdp), 1e-9);
  CHECK(cert.holds);
  CHECK(cert.witnesses.empty());
}

TEST_CASE("uniform reachability holds on the twin gridworld") {
  GridSpec spec;
  spec.walls = {5, 6};
  spec.slip = 0.2;
  const auto mdp = twin_gridworld(spec);
  const auto cert = check_assumption_uniform_reachability(mdp, TabularPolicy::uniform(mdp), 1e-9);
  CHECK(cert.holds);
  CHECK(cert.max_spread <= 1e-12);
}

TEST_CASE("uniform reachability fails on a disconnected goal set") {
  const auto mdp = disconnected_goal_set_mdp();
  const auto cert = check_assumption_uniform_reachability(mdp, TabularPolicy::uniform(mdp), 0, 1e-9);
  CHECK_FALSE(cert.holds);
  CHECK_FALSE(cert.connectivity_holds);
  bool pair = false;
  for (const auto& w : cert.witnesses) pair = pair || (w.part == 1 && w.from == 0 && w.to == 3);
  CHECK(pair);
}

TEST_CASE("policy iteration keeps tied actions and improves values") {
  GridSpec spec;
  spec.width = 3;
  spec.height = 3;
  const auto mdp = gridworld(spec);
  const auto seq = policy_iteration(mdp, TabularPolicy::uniform(mdp), 4);
  REQUIRE(seq.size() == 4u);
  for (std::size_t k = 1; k < seq.size(); ++k) {
    seq[k].validate();
    for (int g = 0; g < mdp.n_goals(); ++g) {
      const auto prev = values_from_occupancy(compute_occupancy(mdp, seq[k - 1], g));
      const auto now = values_from_occupancy(compute_occupancy(mdp, seq[k], g));
      CHECK((now - prev).minCoeff() >= -1e-12);
    }
  }
  CHECK(seq[3] == seq[2]);
}

TEST_CASE("via-goal monotonicity: a single policy is trivially monotone") {
  const auto rep = check_theorem2_monotonicity(chain3(), 1);
  CHECK(rep.steps.empty());
  CHECK(rep.monotone(1e-12));
}

TEST_CASE("via-goal monotonicity over policy iteration on gridworlds") {
  for (double slip : {0.0, 0.2}) {
    GridSpec spec;
    spec.walls = {5, 6};
    spec.slip = slip;
    for (const auto& mdp : {gridworld(spec), twin_gridworld(spec)}) {
      const auto rep = check_theorem2_monotonicity(mdp, 6);
      CHECK(rep.assumption_holds);
      CHECK(rep.steps.size() == 5u);
      CHECK(rep.min_value_diff >= -1e-12);
      CHECK(rep.min_hit_diff >= -1e-12);
      CHECK(rep.min_downstream_diff >= -1e-12);
      CHECK(rep.min_via_diff >= -1e-12);
      CHECK(rep.min_averaged_via_diff >= -1e-12);
      CHECK(rep.monotone(1e-12));
    }
  }
}

TEST_CASE("via-goal values computed two ways agree") {
  GridSpec spec;
  spec.slip = 0.1;
  const auto mdp = gridworld(spec);
  std::mt19937_64 rng(9);
  const auto pi = random_policy(mdp, rng);
  const auto all = compute_all_occupancies(mdp, pi);
  for (int s = 0; s < mdp.n_states(); s += 3)
    for (int g = 0; g < mdp.n_goals(); g += 5)
      for (int h = 0; h < mdp.n_goals(); h += 4) {
        const auto a = via_goal_value(all[h], all[g], s);
        const auto b = via_goal_value(mdp, pi, s, g, h);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
        CHECK(a.value == doctest::Approx(a.hit_probability * a.downstream).epsilon(1e-14));
      }
}

TEST_CASE("verify report on the chain passes and lists margins") {
  const auto mdp = env::load_tabular_gcmdp(GCHR_SOURCE_DIR "/data/chain3.gcmdp");
  const auto rep = verify_tabular_mdp(mdp, {});
  CHECK(rep.all_pass());
  CHECK_FALSE(rep.margins.empty());
  std::stringstream csv;
  write_verify_csv(csv, rep);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "check,goal,value,threshold,margin,pass");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == static_cast<int>(rep.margins.size()));
  for (const auto& m : rep.margins) CHECK(m.margin >= 0.0);
}

TEST_CASE("verify report flags the disconnected goal set") {
  const auto rep = verify_tabular_mdp(disconnected_goal_set_mdp(), {});
  bool flagged = false;
  for (const auto& m : rep.margins)
    if (m.check.find("assumption") != std::string::npos && !m.pass) flagged = true;
  CHECK(flagged);
}

TEST_CASE("policy validation") {
  TabularPolicy pi(2, 1, 2);
  CHECK_THROWS_AS(pi.validate(), ContractViolation);
  pi.set_deterministic(0, 0, 1);
  pi.set_deterministic(1, 0, 0);
  CHECK_NOTHROW(pi.validate());
  CHECK_THROWS_AS(pi.require_compatible(chain3()), ContractViolation);
}

}  // TEST_SUITE
