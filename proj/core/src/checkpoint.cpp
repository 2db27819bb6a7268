#include "daelab/checkpoint.hpp"

#include "daelab/binary_io.hpp"
#include "daelab/errors.hpp"

namespace daelab {
namespace {

constexpr std::string_view kMagic = "DAE1";

void write_tensor(ByteWriter& w, const Tensor& t) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape) w.u64(e);
    for (double v : t.data) w.f64(v);
}

void read_tensor_into(ByteReader& r, Tensor& t) {
    const auto at = r.offset();
    const auto rank = r.u32("tensor rank");
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.u64("tensor extent"));
    if (shape != t.shape) {
        throw FormatError("tensor shape " + shape_string(shape) + " does not match architecture " +
                          shape_string(t.shape), at);
    }
    for (auto& v : t.data) v = r.f64("tensor value");
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Autoencoder& model) {
    const auto& c = model.config;
    ByteWriter w;
    w.bytes(kMagic);
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(c.kind));
    w.u32(static_cast<std::uint32_t>(c.loss_kind));
    w.u64(c.input_dim);
    w.u64(c.latent_dim);
    w.u32(static_cast<std::uint32_t>(c.hidden_sizes.size()));
    for (auto h : c.hidden_sizes) w.u64(h);
    w.f64(c.alpha);
    w.u64(c.lambda.size());
    for (double v : c.lambda.weights) w.f64(v);
    w.f64(c.minmax_momentum);
    w.f64(c.minmax_init_delta);
    w.f64(c.minmax_eps);
    w.f64(c.leaky_slope);
    w.f64(c.beta);
    w.u32(c.factor_count);

    const auto params = model.parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const Tensor* p : params) write_tensor(w, *p);
    for (double v : model.minmax.moving_min) w.f64(v);
    for (double v : model.minmax.moving_max) w.f64(v);
    return w.buffer();
}

Autoencoder parse_checkpoint(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (r.bytes(kMagic.size(), "magic") != kMagic) throw FormatError("not a DAE1 checkpoint (bad magic)", 0);
    const auto version_at = r.offset();
    const auto version = r.u32("version");
    if (version != kCheckpointVersion) {
        throw UnsupportedVersionError("unsupported checkpoint version " + std::to_string(version), version_at);
    }

    ModelConfig c;
    const auto kind_at = r.offset();
    const auto kind = r.u32("model kind");
    if (kind > static_cast<std::uint32_t>(ModelKind::beta_vae)) throw FormatError("invalid model kind", kind_at);
    c.kind = static_cast<ModelKind>(kind);
    const auto loss_at = r.offset();
    const auto loss = r.u32("loss kind");
    if (loss > 1) throw FormatError("invalid loss kind", loss_at);
    c.loss_kind = static_cast<ops::LossKind>(loss);
    c.input_dim = r.u64("input_dim");
    c.latent_dim = r.u64("latent_dim");
    const auto hidden_at = r.offset();
    const auto hidden = r.u32("hidden count");
    if (hidden > 64) throw FormatError("implausible hidden layer count", hidden_at);
    c.hidden_sizes.clear();
    for (std::uint32_t i = 0; i < hidden; ++i) c.hidden_sizes.push_back(r.u64("hidden width"));
    c.alpha = r.f64("alpha");
    c.lambda.alpha = c.alpha;
    const auto lambda_at = r.offset();
    const auto lambda_n = r.u64("lambda count");
    if (lambda_n > r.remaining() / 8) throw FormatError("lambda count exceeds file size", lambda_at);
    for (std::uint64_t i = 0; i < lambda_n; ++i) c.lambda.weights.push_back(r.f64("lambda"));
    c.minmax_momentum = r.f64("rho");
    c.minmax_init_delta = r.f64("delta");
    c.minmax_eps = r.f64("eps");
    c.leaky_slope = r.f64("leaky slope");
    c.beta = r.f64("beta");
    c.factor_count = r.u32("factor count");

    const auto config_end = r.offset();
    // Guard allocation against corrupt extents before building the layers.
    std::uint64_t expected_values = 0;
    {
        std::vector<std::size_t> enc{c.input_dim};
        enc.insert(enc.end(), c.hidden_sizes.begin(), c.hidden_sizes.end());
        enc.push_back(c.encoder_output_dim());
        std::vector<std::size_t> dec{c.decoder_input_dim()};
        dec.insert(dec.end(), c.hidden_sizes.rbegin(), c.hidden_sizes.rend());
        dec.push_back(c.input_dim);
        for (const auto* widths : {&enc, &dec})
            for (std::size_t i = 0; i + 1 < widths->size(); ++i)
                expected_values += (*widths)[i] * (*widths)[i + 1] + (*widths)[i + 1];
    }
    if (expected_values > r.remaining() / 8) throw FormatError("truncated parameter block", config_end);

    Autoencoder model;
    try {
        model = make_model(c, 0);
    } catch (const Error& e) {
        throw FormatError(std::string("invalid model configuration: ") + e.what(), config_end);
    }
    const auto count_at = r.offset();
    const auto count = r.u32("tensor count");
    auto params = model.parameters();
    if (count != params.size()) {
        throw FormatError("checkpoint holds " + std::to_string(count) + " tensors, architecture needs " +
                          std::to_string(params.size()), count_at);
    }
    for (Tensor* p : params) read_tensor_into(r, *p);
    for (auto& v : model.minmax.moving_min) v = r.f64("moving min");
    for (auto& v : model.minmax.moving_max) v = r.f64("moving max");
    if (r.remaining() != 0) throw FormatError("trailing bytes after checkpoint", r.offset());
    return model;
}

void save_checkpoint(const Autoencoder& model, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_checkpoint(model));
}

Autoencoder load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_file(path)); }

}  // namespace daelab
