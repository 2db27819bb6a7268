#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daelab/latent.hpp"

namespace daelab {

using Labels = std::vector<std::uint32_t>;

// Uniform-width bins between the column's min and max; the max lands in the
// last bin and a constant column maps entirely to bin 0.
Labels discretize_column(std::span<const double> values, std::size_t bins);
// One label vector per latent dimension. Throws ArgumentError for bins < 2.
std::vector<Labels> discretize(const LatentMatrix& codes, std::size_t bins);

// Plug-in (maximum-likelihood) estimates in nats.
double entropy(std::span<const std::uint32_t> labels);
double joint_entropy(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
// H(a) + H(b) - H(a, b), clipped at 0.
double mutual_information(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

}  // namespace daelab
