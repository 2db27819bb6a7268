#include "daelab/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "daelab/binary_io.hpp"
#include "daelab/errors.hpp"

namespace daelab {

std::string_view to_string(ToyVariant variant) {
    switch (variant) {
        case ToyVariant::XY: return "XY";
        case ToyVariant::XYC: return "XYC";
        case ToyVariant::XYS: return "XYS";
        case ToyVariant::XYCS: return "XYCS";
    }
    return "?";
}

ToyVariant parse_variant(std::string_view name) {
    if (name == "XY") return ToyVariant::XY;
    if (name == "XYC") return ToyVariant::XYC;
    if (name == "XYS") return ToyVariant::XYS;
    if (name == "XYCS") return ToyVariant::XYCS;
    throw ArgumentError("unknown dataset variant '" + std::string(name) + "' (expected XY, XYC, XYS or XYCS)");
}

void ToyConfig::validate() const {
    if (grid == 0) throw ArgumentError("grid must be positive");
    if (n_colors == 0 || n_shapes == 0) throw ArgumentError("colour and shape counts must be positive");
    if (n_shapes > 3) throw ArgumentError("only circle, square and diamond shapes exist");
    if (color_levels.size() != n_colors) {
        throw ArgumentError("expected " + std::to_string(n_colors) + " colour levels, got " +
                            std::to_string(color_levels.size()));
    }
    for (float c : color_levels)
        if (!(c > 0.0f && c <= 1.0f)) throw ArgumentError("colour levels must lie in (0, 1]");
    const auto r = radius();
    if (r < 3) throw ArgumentError("object radius must be at least 3 pixels so the shapes stay distinct");
    const auto margin = r + 1;
    if (image_side < 2 * margin + 1) throw ArgumentError("image too small for the object radius");
    if (grid > 1 && image_side - 1 - 2 * margin < grid - 1) {
        throw ArgumentError("grid of " + std::to_string(grid) + " positions does not fit in " +
                            std::to_string(image_side) + " pixels without collisions");
    }
}

std::uint32_t ToyConfig::grid_pixel(std::uint32_t idx) const {
    const double margin = radius() + 1.0;
    const double stride = grid > 1 ? (image_side - 1.0 - 2.0 * margin) / (grid - 1.0) : 0.0;
    return static_cast<std::uint32_t>(std::floor(margin + idx * stride));
}

std::size_t FactorDataset::size() const { return specs.empty() ? 0 : factors.size() / specs.size(); }

std::span<const float> FactorDataset::image(std::size_t row) const {
    return std::span(images).subspan(row * input_dim(), input_dim());
}

std::vector<std::uint32_t> FactorDataset::cardinalities() const {
    std::vector<std::uint32_t> out;
    for (const auto& s : specs) out.push_back(s.cardinality);
    return out;
}

std::size_t FactorDataset::row_of(std::span<const std::uint32_t> tuple) const {
    if (tuple.size() != specs.size()) throw DimensionError("factor tuple length does not match dataset");
    std::size_t row = 0;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        if (tuple[k] >= specs[k].cardinality) throw ArgumentError("factor value out of range");
        row = row * specs[k].cardinality + tuple[k];
    }
    return row;
}

ToyVariant FactorDataset::variant() const {
    std::string key;
    for (const auto& s : specs) key += s.name + ",";
    if (key == "x,y,") return ToyVariant::XY;
    if (key == "x,y,color,") return ToyVariant::XYC;
    if (key == "x,y,shape,") return ToyVariant::XYS;
    if (key == "x,y,color,shape,") return ToyVariant::XYCS;
    throw ArgumentError("dataset factors (" + key + ") do not form a toy variant");
}

std::vector<float> render_toy_image(const ToyConfig& config, std::uint32_t x_idx, std::uint32_t y_idx,
                                    std::uint32_t color_idx, std::uint32_t shape_idx) {
    config.validate();
    if (x_idx >= config.grid || y_idx >= config.grid) throw ArgumentError("position index out of range");
    if (color_idx >= config.n_colors) throw ArgumentError("colour index out of range");
    if (shape_idx >= config.n_shapes) throw ArgumentError("shape index out of range");

    const auto side = static_cast<int>(config.image_side);
    const auto r = static_cast<int>(config.radius());
    const auto cx = static_cast<int>(config.grid_pixel(x_idx));
    const auto cy = static_cast<int>(config.grid_pixel(y_idx));
    const float level = config.color_levels[color_idx];
    const auto shape = static_cast<ShapeKind>(shape_idx);

    std::vector<float> img(static_cast<std::size_t>(side * side), 0.0f);
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            bool inside = false;
            switch (shape) {
                case ShapeKind::circle: inside = dx * dx + dy * dy <= r * r; break;
                case ShapeKind::square: inside = std::max(std::abs(dx), std::abs(dy)) <= r - 1; break;
                case ShapeKind::diamond: inside = std::abs(dx) + std::abs(dy) <= r; break;
            }
            if (inside) img[static_cast<std::size_t>((cy + dy) * side + (cx + dx))] = level;
        }
    }
    return img;
}

std::vector<FactorSpec> toy_factor_specs(const ToyConfig& config) {
    std::vector<FactorSpec> specs{{"x", config.grid}, {"y", config.grid}};
    if (config.variant == ToyVariant::XYC || config.variant == ToyVariant::XYCS) specs.push_back({"color", config.n_colors});
    if (config.variant == ToyVariant::XYS || config.variant == ToyVariant::XYCS) specs.push_back({"shape", config.n_shapes});
    return specs;
}

std::size_t toy_dataset_rows(const ToyConfig& config) {
    std::size_t n = 1;
    for (const auto& s : toy_factor_specs(config)) {
        n *= s.cardinality;
        if (n > kMaxDatasetRows) {
            throw SizeError("dataset would exceed " + std::to_string(kMaxDatasetRows) + " rows");
        }
    }
    return n;
}

FactorDataset generate_toy_dataset(const ToyConfig& config, Rng& /*rng*/) {
    config.validate();
    const bool with_color = config.variant == ToyVariant::XYC || config.variant == ToyVariant::XYCS;
    const bool with_shape = config.variant == ToyVariant::XYS || config.variant == ToyVariant::XYCS;

    FactorDataset ds;
    ds.image_side = config.image_side;
    ds.specs = toy_factor_specs(config);
    const std::size_t n = toy_dataset_rows(config);
    const std::size_t f = ds.specs.size();
    const std::size_t d = ds.input_dim();
    ds.factors.resize(n * f);
    ds.images.resize(n * d);

    std::vector<std::uint32_t> tuple(f, 0);
    const auto brightest = config.n_colors - 1;
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t k = 0; k < f; ++k) ds.factors[row * f + k] = static_cast<std::uint16_t>(tuple[k]);
        const auto color = with_color ? tuple[2] : brightest;
        const auto shape = with_shape ? tuple[f - 1] : 0u;
        const auto img = render_toy_image(config, tuple[0], tuple[1], color, shape);
        std::copy(img.begin(), img.end(), ds.images.begin() + static_cast<std::ptrdiff_t>(row * d));
        // Odometer increment, last factor fastest.
        for (std::size_t k = f; k-- > 0;) {
            if (++tuple[k] < ds.specs[k].cardinality) break;
            tuple[k] = 0;
        }
    }
    return ds;
}

FixedFactorBatch fixed_factor_batch(const FactorDataset& dataset, std::size_t k, std::size_t batch_size, Rng& rng) {
    if (k >= dataset.num_factors()) throw ArgumentError("factor index out of range");
    if (batch_size < 2) throw ArgumentError("fixed-factor batch needs at least 2 samples");
    const auto cards = dataset.cardinalities();
    const std::size_t available = dataset.size() / cards[k];
    if (batch_size > available) {
        throw ArgumentError("batch of " + std::to_string(batch_size) + " exceeds the " + std::to_string(available) +
                            " combinations sharing one value of factor " + dataset.specs[k].name);
    }
    FixedFactorBatch out;
    out.fixed_value = static_cast<std::uint32_t>(rng.below(cards[k]));
    std::vector<std::uint32_t> tuple(cards.size());
    const auto d = dataset.input_dim();
    for (std::size_t i = 0; i < batch_size; ++i) {
        for (std::size_t j = 0; j < cards.size(); ++j)
            tuple[j] = j == k ? out.fixed_value : static_cast<std::uint32_t>(rng.below(cards[j]));
        const auto row = dataset.row_of(tuple);
        out.rows.push_back(row);
        const auto img = dataset.image(row);
        out.images.insert(out.images.end(), img.begin(), img.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return out;
}

std::vector<std::uint8_t> serialize_dataset(const FactorDataset& ds) {
    ByteWriter w;
    w.bytes("FDS1");
    w.u32(kDatasetVersion);
    w.u32(ds.image_side);
    w.u64(ds.size());
    w.u32(static_cast<std::uint32_t>(ds.specs.size()));
    for (const auto& s : ds.specs) {
        w.u32(static_cast<std::uint32_t>(s.name.size()));
        w.bytes(s.name);
        w.u32(s.cardinality);
    }
    for (auto v : ds.factors) w.u16(v);
    for (float v : ds.images) w.f32(v);
    return w.buffer();
}

FactorDataset parse_dataset(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.bytes(4, "magic") != "FDS1") throw FormatError("not an FDS1 dataset (bad magic)", 0);
    const auto version_at = r.offset();
    const auto version = r.u32("version");
    if (version != kDatasetVersion) {
        throw UnsupportedVersionError("unsupported dataset version " + std::to_string(version), version_at);
    }
    FactorDataset ds;
    ds.image_side = r.u32("image_side");
    const auto n_at = r.offset();
    const auto n = r.u64("row count");
    const auto f = r.u32("factor count");
    for (std::uint32_t k = 0; k < f; ++k) {
        const auto len_at = r.offset();
        const auto len = r.u32("factor name length");
        if (len > r.remaining()) throw FormatError("factor name longer than file", len_at);
        FactorSpec spec;
        spec.name = r.bytes(len, "factor name");
        const auto card_at = r.offset();
        spec.cardinality = r.u32("cardinality");
        if (spec.cardinality == 0) throw FormatError("zero factor cardinality", card_at);
        ds.specs.push_back(std::move(spec));
    }
    const std::uint64_t d = std::uint64_t{ds.image_side} * ds.image_side;
    const std::uint64_t need = n * f * 2 + n * d * 4;
    if (n > kMaxDatasetRows || need > r.remaining()) {
        throw FormatError("truncated dataset: header promises " + std::to_string(n) + " rows", n_at);
    }
    ds.factors.resize(n * f);
    for (std::size_t i = 0; i < ds.factors.size(); ++i) {
        const auto at = r.offset();
        ds.factors[i] = r.u16("factor label");
        if (ds.factors[i] >= ds.specs[i % f].cardinality) throw FormatError("factor label out of range", at);
    }
    ds.images.resize(n * d);
    for (auto& v : ds.images) v = r.f32("pixel");
    if (r.remaining() != 0) throw FormatError("trailing bytes after dataset", r.offset());
    return ds;
}

void save_dataset(const FactorDataset& dataset, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_dataset(dataset));
}

FactorDataset load_dataset(const std::filesystem::path& path) { return parse_dataset(read_file(path)); }

}  // namespace daelab
