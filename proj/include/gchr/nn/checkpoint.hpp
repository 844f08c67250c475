#pragma once

#include <filesystem>
#include <iosfwd>

#include "gchr/nn/mlp.hpp"

namespace gchr::nn {

// Binary parameter checkpoint, little-endian:
//   8 bytes   magic "GCHRMLP1"
//   u32       activation (0 = relu, 1 = tanh)
//   u32       number of layer sizes L
//   u32 x L   layer sizes, input first
//   per layer: weight (out x in, row-major) then bias (out), as IEEE-754 f64
// Loading reproduces every parameter bit for bit.

void write_mlp(std::ostream& out, const Mlp& net);
Mlp read_mlp(std::istream& in);

void save_mlp(const std::filesystem::path& path, const Mlp& net);
Mlp load_mlp(const std::filesystem::path& path);

}  // namespace gchr::nn
