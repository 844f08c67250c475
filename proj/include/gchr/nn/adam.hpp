#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gchr/nn/mlp.hpp"

namespace gchr::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam moments over a flat parameter vector. For an Mlp the layout is the
/// one used by Mlp::flat_parameters().
struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step_count = 0;

  AdamState() = default;
  AdamState(std::size_t parameter_count, AdamConfig cfg);
  static AdamState for_network(const Mlp& net, AdamConfig cfg = {});
};

/// Bias-corrected Adam update. Throws NumericError naming the offending
/// parameter block if any gradient entry is non-finite; nothing is modified
/// in that case.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);
void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state);

}  // namespace gchr::nn
