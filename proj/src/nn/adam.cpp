#include "gchr/nn/adam.hpp"

#include <cmath>
#include <string>

#include "gchr/errors.hpp"

namespace gchr::nn {

AdamState::AdamState(std::size_t parameter_count, AdamConfig cfg)
    : config(cfg), first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {}

AdamState AdamState::for_network(const Mlp& net, AdamConfig cfg) {
  return AdamState(net.parameter_count(), cfg);
}

namespace {

struct BiasCorrection {
  double c1;
  double c2;
};

BiasCorrection advance(AdamState& state) {
  ++state.step_count;
  const auto t = static_cast<double>(state.step_count);
  return {1.0 - std::pow(state.config.beta1, t), 1.0 - std::pow(state.config.beta2, t)};
}

// Updates one contiguous block; moments start at `offset`.
void update_block(double* params, const double* grads, std::size_t n, std::size_t offset,
                  AdamState& state, BiasCorrection bc) {
  const auto& c = state.config;
  double* m = state.first_moment.data() + offset;
  double* v = state.second_moment.data() + offset;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * grads[i];
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double m_hat = m[i] / bc.c1;
    const double v_hat = v[i] / bc.c2;
    params[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}

bool all_finite(const double* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(p[i])) return false;
  return true;
}

}  // namespace

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
  require(params.size() == grads.size(), "adam_step: parameter/gradient size mismatch");
  require(state.first_moment.size() == params.size(), "adam_step: optimizer state size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i]))
      throw NumericError("adam_step: non-finite gradient in parameter block param[" +
                         std::to_string(i) + "]");
  }
  const auto bc = advance(state);
  update_block(params.data(), grads.data(), params.size(), 0, state, bc);
}

void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state) {
  auto& layers = net.layers();
  require(grads.size() == layers.size(), "adam_step: gradient layer count mismatch");
  require(state.first_moment.size() == net.parameter_count(),
          "adam_step: optimizer state size mismatch");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    require(grads[k].weight.rows() == layers[k].weight.rows() &&
                grads[k].weight.cols() == layers[k].weight.cols() &&
                grads[k].bias.size() == layers[k].bias.size(),
            "adam_step: gradient shape mismatch in layer " + std::to_string(k));
    if (!all_finite(grads[k].weight.data(), grads[k].weight.size()))
      throw NumericError("adam_step: non-finite gradient in parameter block layer" +
                         std::to_string(k) + ".weight");
    if (!all_finite(grads[k].bias.data(), grads[k].bias.size()))
      throw NumericError("adam_step: non-finite gradient in parameter block layer" +
                         std::to_string(k) + ".bias");
  }
  const auto bc = advance(state);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto nw = static_cast<std::size_t>(layers[k].weight.size());
    update_block(layers[k].weight.data(), grads[k].weight.data(), nw, offset, state, bc);
    offset += nw;
    const auto nb = static_cast<std::size_t>(layers[k].bias.size());
    update_block(layers[k].bias.data(), grads[k].bias.data(), nb, offset, state, bc);
    offset += nb;
  }
}

}  // namespace gchr::nn
