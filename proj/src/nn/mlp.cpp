#include "gchr/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "gchr/errors.hpp"

namespace gchr::nn {

std::string to_string(Activation activation) {
  return activation == Activation::ReLU ? "relu" : "tanh";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu") return Activation::ReLU;
  if (name == "tanh") return Activation::Tanh;
  throw ContractViolation("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  require(sizes_.size() >= 2, "Mlp needs at least an input and an output size");
  for (int s : sizes_) require(s > 0, "Mlp layer sizes must be positive");
  layers_.reserve(sizes_.size() - 1);
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    layers_.push_back({Matrix::Zero(sizes_[k + 1], sizes_[k]), Vector::Zero(sizes_[k + 1])});
  }
}

Mlp Mlp::uniform_init(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed) {
  Mlp net(std::move(layer_sizes), activation);
  std::mt19937_64 rng(seed);
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.weight.cols()));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) layer.weight(i, j) = u(rng);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = u(rng);
  }
  return net;
}

namespace {

void apply_activation(Matrix& m, Activation a) {
  if (a == Activation::ReLU) {
    m = m.cwiseMax(0.0);
  } else {
    m = m.array().tanh().matrix();
  }
}

// Multiplies grad in place by the activation derivative at the preactivation.
void apply_activation_derivative(Matrix& grad, const Matrix& pre, Activation a) {
  if (a == Activation::ReLU) {
    grad = (pre.array() > 0.0).select(grad, 0.0);
  } else {
    grad.array() *= 1.0 - pre.array().tanh().square();
  }
}

}  // namespace

Vector Mlp::forward(const Vector& input) const {
  require(input.size() == input_dim(), "mlp_forward: input has length " +
                                           std::to_string(input.size()) + ", expected " +
                                           std::to_string(input_dim()));
  Vector x = input;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Vector z = layers_[k].weight * x + layers_[k].bias;
    if (k + 1 < layers_.size()) {
      if (activation_ == Activation::ReLU)
        z = z.cwiseMax(0.0);
      else
        z = z.array().tanh().matrix();
    }
    x = std::move(z);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& inputs) const {
  require(inputs.rows() == input_dim(), "mlp_forward: input has " + std::to_string(inputs.rows()) +
                                            " rows, expected " + std::to_string(input_dim()));
  Matrix x = inputs;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Matrix z = layers_[k].weight * x;
    z.colwise() += layers_[k].bias;
    if (k + 1 < layers_.size()) apply_activation(z, activation_);
    x = std::move(z);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& inputs, ForwardTape& tape) const {
  require(inputs.rows() == input_dim(), "mlp_forward: input has " + std::to_string(inputs.rows()) +
                                            " rows, expected " + std::to_string(input_dim()));
  tape.layer_inputs.clear();
  tape.preactivations.clear();
  Matrix x = inputs;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    Matrix z = layers_[k].weight * x;
    z.colwise() += layers_[k].bias;
    tape.layer_inputs.push_back(std::move(x));
    tape.preactivations.push_back(z);
    if (k + 1 < layers_.size()) apply_activation(z, activation_);
    x = std::move(z);
  }
  return x;
}

MlpGradients Mlp::backward(const ForwardTape& tape, const Matrix& upstream,
                           Matrix* input_grad) const {
  require(tape.layer_inputs.size() == layers_.size(), "mlp_backward: tape does not match network");
  require(upstream.rows() == output_dim() && upstream.cols() == tape.layer_inputs.front().cols(),
          "mlp_backward: upstream gradient shape mismatch");
  MlpGradients grads(layers_.size());
  Matrix delta = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) apply_activation_derivative(delta, tape.preactivations[k], activation_);
    grads[k].weight.noalias() = delta * tape.layer_inputs[k].transpose();
    grads[k].bias = delta.rowwise().sum();
    if (k > 0 || input_grad != nullptr) {
      Matrix next = layers_[k].weight.transpose() * delta;
      delta = std::move(next);
    }
  }
  if (input_grad != nullptr) *input_grad = std::move(delta);
  return grads;
}

Matrix Mlp::input_gradient(const ForwardTape& tape, const Matrix& upstream) const {
  require(tape.layer_inputs.size() == layers_.size(), "mlp_backward: tape does not match network");
  require(upstream.rows() == output_dim() && upstream.cols() == tape.layer_inputs.front().cols(),
          "mlp_backward: upstream gradient shape mismatch");
  Matrix delta = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    if (k + 1 < layers_.size()) apply_activation_derivative(delta, tape.preactivations[k], activation_);
    Matrix next = layers_[k].weight.transpose() * delta;
    delta = std::move(next);
  }
  return delta;
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients g;
  g.reserve(layers_.size());
  for (const auto& layer : layers_)
    g.push_back({Matrix::Zero(layer.weight.rows(), layer.weight.cols()),
                 Vector::Zero(layer.bias.size())});
  return g;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

std::vector<double> Mlp::flat_parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& layer : layers_) {
    out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return out;
}

void Mlp::set_flat_parameters(std::span<const double> values) {
  require(values.size() == parameter_count(), "set_flat_parameters: wrong parameter count");
  std::size_t offset = 0;
  for (auto& layer : layers_) {
    std::copy_n(values.begin() + offset, layer.weight.size(), layer.weight.data());
    offset += layer.weight.size();
    std::copy_n(values.begin() + offset, layer.bias.size(), layer.bias.data());
    offset += layer.bias.size();
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (sizes_ != other.sizes_ || activation_ != other.activation_) return false;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    if (layers_[k].weight != other.layers_[k].weight || layers_[k].bias != other.layers_[k].bias)
      return false;
  }
  return true;
}

void add_scaled(MlpGradients& into, const MlpGradients& other, double scale) {
  require(into.size() == other.size(), "add_scaled: layer count mismatch");
  for (std::size_t k = 0; k < into.size(); ++k) {
    into[k].weight += scale * other[k].weight;
    into[k].bias += scale * other[k].bias;
  }
}

std::vector<double> flatten(const MlpGradients& grads) {
  std::vector<double> out;
  for (const auto& layer : grads) {
    out.insert(out.end(), layer.weight.data(), layer.weight.data() + layer.weight.size());
    out.insert(out.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return out;
}

void polyak_average(Mlp& target, const Mlp& source, double rho) {
  require(target.layer_sizes() == source.layer_sizes(), "polyak_average: shape mismatch");
  auto& t = target.layers();
  const auto& s = source.layers();
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k].weight = rho * t[k].weight + (1.0 - rho) * s[k].weight;
    t[k].bias = rho * t[k].bias + (1.0 - rho) * s[k].bias;
  }
}

}  // namespace gchr::nn
