#pragma once

#include <string>
#include <vector>

namespace gchr::learn {

enum class PriorSource { TargetActor, DelayedCopy };

std::string to_string(PriorSource s);
PriorSource prior_source_from_string(const std::string& name);

struct GchrConfig {
  double alpha = 1.0;   // HSR weight
  double beta = 0.2;    // HGR weight
  double gamma = 0.98;
  double polyak = 0.95;  // target <- polyak * target + (1 - polyak) * online
  // Hindsight goals per HGR prior; 0 derives K from the HER goal fraction.
  int hindsight_k = 0;
  int prior_samples = 4;  // Monte-Carlo actions per element for the HGR term
  int batch_size = 256;
  int updates_per_cycle = 40;
  PriorSource prior_source = PriorSource::TargetActor;
  int tau_delay = 40;
  double entropy_coeff = 0.0;
  double actor_lr = 1e-3;
  double critic_lr = 1e-3;
  std::vector<int> hidden_sizes = {64, 64};
  bool squash = true;

  void validate() const;
};

}  // namespace gchr::learn
