#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "daelab/binary_io.hpp"
#include "daelab/cli/cli.hpp"
#include "daelab/errors.hpp"

namespace daelab::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string text_of(const std::vector<std::uint8_t>& bytes) { return std::string(bytes.begin(), bytes.end()); }

}  // namespace

KeyValues parse_config_text(std::string_view text) {
    KeyValues out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const auto raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ArgumentError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ArgumentError("config line " + std::to_string(line_no) + ": empty key");
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
    if (args.size() < 2) return args;
    std::vector<std::string> from_files;
    std::vector<std::string> rest;
    for (std::size_t i = 2; i < args.size(); ++i) {
        std::string path;
        rest.push_back(args[i]);
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
            rest.push_back(path);
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            continue;
        }
        for (const auto& [key, value] : parse_config_text(text_of(read_file(path)))) {
            std::string name = key;
            if (name == "config") throw ArgumentError("config files cannot include other config files");
            std::replace(name.begin(), name.end(), '_', '-');
            from_files.push_back("--" + name + "=" + value);
        }
    }
    std::vector<std::string> out{args[0], args[1]};
    out.insert(out.end(), from_files.begin(), from_files.end());
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

void write_manifest(const std::filesystem::path& path, const KeyValues& entries) {
    std::string text;
    for (const auto& [key, value] : entries) text += key + ": " + value + "\n";
    write_text_atomic(path, text);
}

KeyValues read_manifest(const std::filesystem::path& path) {
    KeyValues out;
    std::istringstream in(text_of(read_file(path)));
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(": ");
        if (colon == std::string::npos) continue;
        out.emplace_back(line.substr(0, colon), line.substr(colon + 2));
    }
    return out;
}

std::string encode_pgm(std::size_t width, std::size_t height, std::span<const double> pixels) {
    if (pixels.size() != width * height) {
        throw DimensionError("pgm: expected " + std::to_string(width * height) + " pixels, got " +
                             std::to_string(pixels.size()));
    }
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.reserve(out.size() + pixels.size());
    for (double v : pixels) {
        const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    return out;
}

double default_alpha(ToyVariant variant) {
    switch (variant) {
        case ToyVariant::XY:
            // Every entry of the XY spectrum rounds to 1, so α is never used.
            return 0.005;
        case ToyVariant::XYC:
            return 0.005;
        case ToyVariant::XYS:
            return 0.001;
        case ToyVariant::XYCS:
            return 0.0005;
    }
    return 0.005;
}

double default_beta(ToyVariant variant) {
    switch (variant) {
        case ToyVariant::XY:
            return 16.0;
        case ToyVariant::XYC:
        case ToyVariant::XYS:
            return 64.0;
        case ToyVariant::XYCS:
            return 32.0;
    }
    return 1.0;
}

std::vector<double> median_codes(const LatentMatrix& z) {
    if (z.rows == 0) throw EmptyInputError("median of an empty latent matrix");
    std::vector<double> out(z.cols);
    for (std::size_t j = 0; j < z.cols; ++j) {
        auto col = z.column(j);
        std::sort(col.begin(), col.end());
        const std::size_t mid = col.size() / 2;
        out[j] = col.size() % 2 ? col[mid] : 0.5 * (col[mid - 1] + col[mid]);
    }
    return out;
}

std::vector<double> traversal_values(const Autoencoder& model, const LatentMatrix& z, std::size_t j,
                                     std::size_t steps) {
    if (j >= model.config.latent_dim) {
        throw ArgumentError("latent dimension " + std::to_string(j) + " out of range (n = " +
                            std::to_string(model.config.latent_dim) + ")");
    }
    if (steps == 0) throw ArgumentError("traversal needs at least one step");
    if (steps == 1) return {median_codes(z)[j]};

    double lo = 0.0;
    double width = 1.0;
    if (model.config.kind == ModelKind::dae) {
        width = model.config.lambda.weights.at(j);
    } else {
        const auto col = z.column(j);
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        lo = *mn;
        // Include both ends of the observed range.
        width = (*mx - *mn) * static_cast<double>(steps) / static_cast<double>(steps - 1);
    }
    std::vector<double> out(steps);
    for (std::size_t s = 0; s < steps; ++s) out[s] = lo + width * static_cast<double>(s) / static_cast<double>(steps);
    return out;
}

std::vector<double> decode_traversal(Autoencoder& model, std::span<const double> base, std::size_t j,
                                     std::span<const double> values) {
    const std::size_t n = model.config.latent_dim;
    if (base.size() != n) throw DimensionError("traversal base code has the wrong width");
    if (j >= n) throw ArgumentError("latent dimension " + std::to_string(j) + " out of range");
    std::vector<double> codes;
    codes.reserve(values.size() * n);
    for (double v : values) {
        for (std::size_t d = 0; d < n; ++d) codes.push_back(d == j ? v : base[d]);
    }
    Tape tape;
    const Var code = tape.constant(Tensor::matrix(values.size(), n, std::move(codes)));
    const Var out = model.config.kind == ModelKind::dae ? decode_dae_code(tape, model, code)
                                                        : decode(tape, model, code);
    return out.value().data;
}

std::vector<double> tile_frames(std::span<const double> frames, std::size_t count, std::size_t side) {
    const std::size_t frame_size = side * side;
    if (frames.size() != count * frame_size) throw DimensionError("frame buffer does not match count × side²");
    const std::size_t width = count * side;
    std::vector<double> out(frames.size());
    for (std::size_t f = 0; f < count; ++f)
        for (std::size_t r = 0; r < side; ++r)
            for (std::size_t c = 0; c < side; ++c) out[r * width + f * side + c] = frames[f * frame_size + r * side + c];
    return out;
}

std::size_t occupied_grid_cells(std::span<const double> a, std::span<const double> b, std::size_t grid) {
    if (a.size() != b.size()) throw DimensionError("grid cells: column lengths differ");
    if (a.empty()) return 0;
    auto normaliser = [](std::span<const double> col) {
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        const double lo = *mn;
        const double span = *mx - *mn;
        return [lo, span](double v) { return span > 0 ? (v - lo) / span : 0.0; };
    };
    const auto na = normaliser(a);
    const auto nb = normaliser(b);
    const double g = static_cast<double>(grid);
    std::set<std::pair<long, long>> cells;
    for (std::size_t i = 0; i < a.size(); ++i) cells.emplace(std::lround(na(a[i]) * g), std::lround(nb(b[i]) * g));
    return cells.size();
}

}  // namespace daelab::cli
