#include "gchr/nn/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gchr/errors.hpp"

namespace gchr::nn {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'C', 'H', 'R', 'M', 'L', 'P', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ContractViolation("checkpoint: truncated header");
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw ContractViolation("checkpoint: truncated parameter data");
  return v;
}

}  // namespace

void write_mlp(std::ostream& out, const Mlp& net) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, net.activation() == Activation::ReLU ? 0u : 1u);
  put_u32(out, static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (int s : net.layer_sizes()) put_u32(out, static_cast<std::uint32_t>(s));
  for (const auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) put_f64(out, layer.weight(i, j));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) put_f64(out, layer.bias(i));
  }
}

Mlp read_mlp(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ContractViolation("checkpoint: bad magic");
  const auto act = get_u32(in);
  if (act > 1) throw ContractViolation("checkpoint: unknown activation code");
  const auto n = get_u32(in);
  if (n < 2 || n > 64) throw ContractViolation("checkpoint: implausible layer count");
  std::vector<int> sizes(n);
  for (auto& s : sizes) {
    const auto v = get_u32(in);
    if (v == 0 || v > (1u << 20)) throw ContractViolation("checkpoint: implausible layer size");
    s = static_cast<int>(v);
  }
  Mlp net(sizes, act == 0 ? Activation::ReLU : Activation::Tanh);
  for (auto& layer : net.layers()) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = get_f64(in);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = get_f64(in);
  }
  return net;
}

void save_mlp(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
  write_mlp(out, net);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

Mlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
  return read_mlp(in);
}

}  // namespace gchr::nn
