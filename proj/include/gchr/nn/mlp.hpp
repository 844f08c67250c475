#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gchr::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { ReLU, Tanh };

std::string to_string(Activation activation);
Activation activation_from_string(const std::string& name);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

// Gradients share the parameter layout, one DenseLayer per layer.
using MlpGradients = std::vector<DenseLayer>;

// Activations recorded by a batched forward pass, consumed by backward().
struct ForwardTape {
  std::vector<Matrix> layer_inputs;
  std::vector<Matrix> preactivations;
};

/// Fully connected network. Hidden layers apply the activation, the output
/// layer is affine. Batched calls take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> layer_sizes, Activation activation);

  /// Weights and biases drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  static Mlp uniform_init(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed);

  Vector forward(const Vector& input) const;
  Matrix forward(const Matrix& inputs) const;
  Matrix forward(const Matrix& inputs, ForwardTape& tape) const;

  /// Parameter gradients of sum(upstream .* output) for the batch on the tape.
  /// When input_grad is non-null it receives d/d(inputs).
  MlpGradients backward(const ForwardTape& tape, const Matrix& upstream,
                        Matrix* input_grad = nullptr) const;

  /// d/d(inputs) only, skipping parameter gradients.
  Matrix input_gradient(const ForwardTape& tape, const Matrix& upstream) const;

  MlpGradients zero_gradients() const;

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

  bool operator==(const Mlp& other) const;

 private:
  std::vector<int> sizes_;
  Activation activation_ = Activation::ReLU;
  std::vector<DenseLayer> layers_;
};

void add_scaled(MlpGradients& into, const MlpGradients& other, double scale = 1.0);
std::vector<double> flatten(const MlpGradients& grads);

// target <- rho * target + (1 - rho) * source
void polyak_average(Mlp& target, const Mlp& source, double rho);

}  // namespace gchr::nn
