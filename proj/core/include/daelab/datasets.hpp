#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daelab/rng.hpp"

namespace daelab {

enum class ToyVariant { XY, XYC, XYS, XYCS };

std::string_view to_string(ToyVariant variant);
// Throws ArgumentError for anything but XY, XYC, XYS, XYCS.
ToyVariant parse_variant(std::string_view name);

enum class ShapeKind : std::uint32_t { circle = 0, square = 1, diamond = 2 };

struct FactorSpec {
    std::string name;
    std::uint32_t cardinality = 1;

    bool operator==(const FactorSpec&) const = default;
};

/// 2D toy generator settings. Paper scale is grid 53 / side 84; the
/// defaults are the desk-scale 16 / 32.
struct ToyConfig {
    ToyVariant variant = ToyVariant::XY;
    std::uint32_t grid = 16;
    std::uint32_t image_side = 32;
    std::uint32_t n_colors = 5;
    std::uint32_t n_shapes = 3;
    // 0 selects image_side / 8.
    std::uint32_t object_radius = 0;
    std::vector<float> color_levels{0.2f, 0.4f, 0.6f, 0.8f, 1.0f};

    std::uint32_t radius() const { return object_radius ? object_radius : image_side / 8; }
    // Throws ArgumentError if an object can leave the frame or a count is zero.
    void validate() const;
    // Pixel coordinate of grid index `idx` along either axis.
    std::uint32_t grid_pixel(std::uint32_t idx) const;
};

/// Images with exhaustive integer factor labels in odometer order (the last
/// factor varies fastest).
struct FactorDataset {
    std::uint32_t image_side = 0;
    std::vector<FactorSpec> specs;
    std::vector<std::uint16_t> factors;  // N × F row-major
    std::vector<float> images;           // N × side² row-major, values in [0, 1]

    std::size_t size() const;
    std::size_t num_factors() const { return specs.size(); }
    std::size_t input_dim() const { return std::size_t{image_side} * image_side; }
    std::span<const float> image(std::size_t row) const;
    std::uint16_t factor(std::size_t row, std::size_t k) const { return factors[row * specs.size() + k]; }
    std::vector<std::uint32_t> cardinalities() const;

    // Row of a factor tuple, assuming the exhaustive odometer layout.
    std::size_t row_of(std::span<const std::uint32_t> tuple) const;

    // Inferred from factor names; throws ArgumentError for a foreign layout.
    ToyVariant variant() const;

    bool operator==(const FactorDataset&) const = default;
};

inline constexpr std::size_t kMaxDatasetRows = 10'000'000;

// Single image of side² pixels: background 0, one filled object.
std::vector<float> render_toy_image(const ToyConfig& config, std::uint32_t x_idx, std::uint32_t y_idx,
                                    std::uint32_t color_idx, std::uint32_t shape_idx);

// Factor names and cardinalities of a variant, in label-column order.
std::vector<FactorSpec> toy_factor_specs(const ToyConfig& config);
// Product of the cardinalities. Throws SizeError above kMaxDatasetRows.
std::size_t toy_dataset_rows(const ToyConfig& config);

// Exhaustive product of the variant's factors. Inactive factors stay at the
// brightest colour and the circle. Generation is deterministic; `rng` is
// accepted for interface symmetry and is not consumed.
FactorDataset generate_toy_dataset(const ToyConfig& config, Rng& rng);

struct FixedFactorBatch {
    std::vector<std::size_t> rows;
    std::uint32_t fixed_value = 0;
    std::vector<float> images;  // rows.size() × input_dim
};

// L samples sharing one uniformly drawn value of factor k; the other factors
// are drawn i.i.d. uniform. Requires an exhaustive dataset.
FixedFactorBatch fixed_factor_batch(const FactorDataset& dataset, std::size_t k, std::size_t batch_size, Rng& rng);

// FDS1, little-endian: "FDS1", u32 version, u32 image_side, u64 N, u32 F,
// F × (u32 name length, name bytes, u32 cardinality), u16 labels[N×F], f32 images[N×side²].
inline constexpr std::uint32_t kDatasetVersion = 1;

std::vector<std::uint8_t> serialize_dataset(const FactorDataset& dataset);
FactorDataset parse_dataset(std::span<const std::uint8_t> bytes);
void save_dataset(const FactorDataset& dataset, const std::filesystem::path& path);
FactorDataset load_dataset(const std::filesystem::path& path);

}  // namespace daelab
