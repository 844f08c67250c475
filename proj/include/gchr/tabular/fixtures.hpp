#pragma once

#include <random>
#include <vector>

#include "gchr/env/tabular_mdp.hpp"

namespace gchr::tabular {

/// s0 -> s1 -> s2 with s2 self-looping, one action, phi = identity.
env::TabularGCMDP chain3(double gamma = 0.5);

struct GridSpec {
  int width = 4;
  int height = 4;
  /// Probability that the move is replaced by a uniformly random one of the
  /// four moves.
  double slip = 0.0;
  std::vector<int> walls;  // blocked cells, index y * width + x
  double gamma = 0.9;
};

/// Four-move gridworld over the free cells (up, right, down, left). Moves
/// into walls or the border leave the agent in place. phi = identity, so
/// each goal set is one cell.
env::TabularGCMDP gridworld(const GridSpec& spec);

/// The same grid with a binary heading per cell and a fifth action that
/// flips the heading. State 2 * c + h, phi(state) = c, so every goal set
/// holds two mutually reachable states with identical outlooks.
env::TabularGCMDP twin_gridworld(const GridSpec& spec);

/// Random absorbing MDP: sparse random transition rows and phi mapping
/// states onto between 1 and n_states goals.
env::TabularGCMDP random_absorbing_mdp(int n_states, int n_actions, double gamma,
                                       std::mt19937_64& rng);

/// Four states, two of which share goal 0 without being able to reach each
/// other inside that goal set.
env::TabularGCMDP disconnected_goal_set_mdp(double gamma = 0.9);

}  // namespace gchr::tabular
