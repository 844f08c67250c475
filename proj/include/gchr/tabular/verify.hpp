#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gchr/env/tabular_mdp.hpp"
#include "gchr/tabular/occupancy.hpp"

namespace gchr::tabular {

/// Q of a policy pursuing `goal` by repeated Bellman backups
/// Q <- r + gamma P_g V until the sup-norm change drops below `tolerance`.
/// Independent of the direct solve in compute_occupancy.
Matrix evaluate_q_iterative(const env::TabularGCMDP& mdp, const TabularPolicy& policy, int goal,
                            double tolerance = 1e-13, int max_sweeps = 1'000'000);

struct VerifyOptions {
  int policy_iterations = 5;
  double delta = 1e-9;
  double tolerance = 1e-9;
  double support_threshold = 1e-6;
  int log_episodes = 200;
  int log_horizon = 20;
  std::uint64_t seed = 0;
};

/// One row of the margins CSV. margin >= 0 means the check passed.
struct CheckMargin {
  std::string check;
  int goal = -1;
  double value = 0.0;
  double threshold = 0.0;
  double margin = 0.0;
  bool pass = true;
};

struct VerifyReport {
  std::vector<CheckMargin> margins;
  std::vector<std::string> notes;
  bool all_pass() const;
};

/// Runs every tabular check on one MDP with the uniform policy and the
/// policy-iteration sequence started from it.
VerifyReport verify_tabular_mdp(const env::TabularGCMDP& mdp, const VerifyOptions& options);

void write_verify_text(std::ostream& out, const env::TabularGCMDP& mdp, const VerifyReport& report);
void write_verify_csv(std::ostream& out, const VerifyReport& report);

}  // namespace gchr::tabular
