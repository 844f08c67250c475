#include "gchr/tabular/occupancy.hpp"

#include "gchr/errors.hpp"

namespace gchr::tabular {

Matrix policy_transition_matrix(const env::TabularGCMDP& mdp, const TabularPolicy& policy,
                                int goal) {
  policy.require_compatible(mdp);
  const int n = mdp.n_states();
  Matrix p = Matrix::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    if (mdp.absorbing_goals() && mdp.phi(s) == goal) {
      p(s, s) = 1.0;
      continue;
    }
    for (int a = 0; a < mdp.n_actions(); ++a) {
      const double w = policy.prob(s, goal, a);
      if (w == 0.0) continue;
      const double* row = mdp.row(s, a);
      for (int k = 0; k < n; ++k) p(s, k) += w * row[k];
    }
  }
  return p;
}

void first_hit_distribution(const env::TabularGCMDP& mdp, const Matrix& policy_transitions,
                            int goal, Matrix& first_hit, Vector& hit_mass) {
  const int n = mdp.n_states();
  const double gamma = mdp.gamma();
  std::vector<int> outside;
  for (int s = 0; s < n; ++s)
    if (mdp.phi(s) != goal) outside.push_back(s);
  const auto& inside = mdp.goal_set(goal);

  first_hit = Matrix::Zero(n, n);
  hit_mass = Vector::Zero(n);
  for (int s : inside) {
    first_hit(s, s) = 1.0;
    hit_mass(s) = 1.0;
  }
  if (outside.empty() || inside.empty()) return;

  const int m = static_cast<int>(outside.size());
  const int k = static_cast<int>(inside.size());
  Matrix taboo(m, m);
  Matrix entry(m, k);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) taboo(i, j) = -gamma * policy_transitions(outside[i], outside[j]);
    taboo(i, i) += 1.0;
    for (int j = 0; j < k; ++j) entry(i, j) = gamma * policy_transitions(outside[i], inside[j]);
  }
  const Matrix h = taboo.partialPivLu().solve(entry);
  for (int i = 0; i < m; ++i) {
    const double mass = h.row(i).sum();
    hit_mass(outside[i]) = mass;
    if (mass <= 0.0) continue;
    for (int j = 0; j < k; ++j) first_hit(outside[i], inside[j]) = h(i, j) / mass;
  }
}

OccupancyTable compute_occupancy(const env::TabularGCMDP& mdp, const TabularPolicy& policy,
                                 int goal) {
  require(goal >= 0 && goal < mdp.n_goals(), "compute_occupancy: goal out of range");
  const int n = mdp.n_states();
  const int na = mdp.n_actions();
  const double gamma = mdp.gamma();

  OccupancyTable t;
  t.goal = goal;
  t.n_states = n;
  t.n_actions = na;
  t.gamma = gamma;

  const Matrix p_pi = policy_transition_matrix(mdp, policy, goal);
  const Matrix system = Matrix::Identity(n, n) - gamma * p_pi;
  const Matrix visits = system.partialPivLu().solve(Matrix::Identity(n, n));
  t.d_marginal = (1.0 - gamma) * visits;

  Matrix step(n * na, n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < na; ++a) {
      const auto row = env::tabular_step_distribution(mdp, s, a, goal);
      step.row(s * na + a) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), n);
    }
  }
  t.d_action = gamma * step * visits;
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < na; ++a) t.d_action(s * na + a, s) += 1.0;
  t.d_action *= 1.0 - gamma;

  Vector indicator = Vector::Zero(n);
  for (int s : mdp.goal_set(goal)) indicator(s) = 1.0;
  t.p_goal = t.d_marginal * indicator;
  t.p_goal_action = t.d_action * indicator;

  first_hit_distribution(mdp, p_pi, goal, t.first_hit, t.hit_mass);
  return t;
}

double q_from_occupancy(const OccupancyTable& table, int s, int a) {
  require(s >= 0 && s < table.n_states && a >= 0 && a < table.n_actions,
          "q_from_occupancy: index out of range");
  return table.p(s, a) / (1.0 - table.gamma);
}

double v_from_occupancy(const OccupancyTable& table, int s) {
  require(s >= 0 && s < table.n_states, "v_from_occupancy: state out of range");
  return table.p_goal(s) / (1.0 - table.gamma);
}

Vector values_from_occupancy(const OccupancyTable& table) {
  return table.p_goal / (1.0 - table.gamma);
}

ViaGoalValue via_goal_value(const OccupancyTable& to_subgoal, const OccupancyTable& to_goal,
                            int s) {
  require(s >= 0 && s < to_subgoal.n_states, "via_goal_value: state out of range");
  require(to_subgoal.n_states == to_goal.n_states, "via_goal_value: tables from different MDPs");
  ViaGoalValue out;
  out.hit_probability = to_subgoal.p_goal(s);
  if (to_subgoal.hit_mass(s) <= 0.0) return out;
  out.downstream = to_subgoal.first_hit.row(s).dot(values_from_occupancy(to_goal));
  out.value = out.hit_probability * out.downstream;
  return out;
}

ViaGoalValue via_goal_value(const env::TabularGCMDP& mdp, const TabularPolicy& policy, int s,
                            int goal, int subgoal) {
  const auto sub = compute_occupancy(mdp, policy, subgoal);
  if (subgoal == goal) return via_goal_value(sub, sub, s);
  return via_goal_value(sub, compute_occupancy(mdp, policy, goal), s);
}

std::vector<OccupancyTable> compute_all_occupancies(const env::TabularGCMDP& mdp,
                                                    const TabularPolicy& policy) {
  std::vector<OccupancyTable> out;
  out.reserve(mdp.n_goals());
  for (int g = 0; g < mdp.n_goals(); ++g) out.push_back(compute_occupancy(mdp, policy, g));
  return out;
}

}  // namespace gchr::tabular
