#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "daelab/model.hpp"

namespace daelab {

// DAE1 checkpoint, little-endian:
//   "DAE1", u32 version,
//   config: u32 kind, u32 loss, u64 input_dim, u64 latent_dim, u32 hidden count, u64 hidden[],
//           f64 alpha, u64 lambda count, f64 lambda[], f64 rho, f64 delta, f64 eps,
//           f64 leaky_slope, f64 beta, u32 factor_count,
//   u32 tensor count, per tensor: u32 rank, u64 extents[], f64 values[] (declaration order),
//   f64 moving_min[latent_dim], f64 moving_max[latent_dim].
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> serialize_checkpoint(const Autoencoder& model);
Autoencoder parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Autoencoder& model, const std::filesystem::path& path);
Autoencoder load_checkpoint(const std::filesystem::path& path);

}  // namespace daelab
