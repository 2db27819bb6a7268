#include "daelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "daelab/errors.hpp"

namespace daelab {

std::string_view to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::dae: return "dae";
        case ModelKind::ae: return "ae";
        case ModelKind::vae: return "vae";
        case ModelKind::beta_vae: return "beta_vae";
    }
    return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "dae") return ModelKind::dae;
    if (name == "ae") return ModelKind::ae;
    if (name == "vae") return ModelKind::vae;
    if (name == "beta_vae") return ModelKind::beta_vae;
    throw ArgumentError("unknown model kind '" + std::string(name) + "' (expected dae, ae, vae or beta_vae)");
}

std::string_view to_string(ops::LossKind kind) { return kind == ops::LossKind::bce ? "bce" : "mse"; }

ops::LossKind parse_loss_kind(std::string_view name) {
    if (name == "mse") return ops::LossKind::mse;
    if (name == "bce") return ops::LossKind::bce;
    throw ArgumentError("unknown loss '" + std::string(name) + "' (expected mse or bce)");
}

void ModelConfig::validate() const {
    if (input_dim == 0) throw ArgumentError("model input_dim must be positive");
    if (latent_dim == 0) throw ArgumentError("model latent_dim must be positive");
    for (auto h : hidden_sizes)
        if (h == 0) throw ArgumentError("hidden layer widths must be positive");
    if (kind == ModelKind::dae) {
        if (lambda.size() != latent_dim) {
            throw DimensionError("lambda has " + std::to_string(lambda.size()) + " entries for latent_dim " +
                                 std::to_string(latent_dim));
        }
        if (!(minmax_momentum > 0.0 && minmax_momentum <= 1.0))
            throw ArgumentError("min-max momentum must lie in (0, 1]");
        if (!(minmax_init_delta > 0.0)) throw ArgumentError("min-max init delta must be positive");
        if (!(minmax_eps > 0.0)) throw ArgumentError("min-max eps must be positive");
    }
    if (is_vae() && !(beta > 0.0)) throw ArgumentError("beta must be positive");
}

std::size_t ModelConfig::encoder_output_dim() const { return is_vae() ? 2 * latent_dim : latent_dim; }

std::size_t ModelConfig::decoder_input_dim() const {
    return kind == ModelKind::dae ? 2 * latent_dim : latent_dim;
}

Var mlp_forward(Tape& tape, Mlp& mlp, const Var& x, double leaky_slope, OutputActivation output) {
    Var h = x;
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        auto& layer = mlp.layers[i];
        if (h.cols() != layer.weight.rows()) {
            throw DimensionError("layer " + std::to_string(i) + " expects width " +
                                 std::to_string(layer.weight.rows()) + ", got input " + shape_string(h.shape()));
        }
        h = ops::add_bias(ops::matmul(h, tape.watch(layer.weight)), tape.watch(layer.bias));
        const bool last = i + 1 == mlp.layers.size();
        if (!last) {
            h = ops::leaky_relu(h, leaky_slope);
        } else if (output == OutputActivation::sigmoid) {
            h = ops::sigmoid(h);
        }
    }
    return h;
}

MovingMinMaxState MovingMinMaxState::initial(std::size_t n, double delta) {
    return {std::vector<double>(n, 0.5 - delta), std::vector<double>(n, 0.5 + delta)};
}

std::vector<Tensor*> Autoencoder::parameters() {
    std::vector<Tensor*> out;
    for (auto* mlp : {&encoder, &decoder})
        for (auto& layer : mlp->layers) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    return out;
}

std::vector<const Tensor*> Autoencoder::parameters() const {
    std::vector<const Tensor*> out;
    for (const auto* mlp : {&encoder, &decoder})
        for (const auto& layer : mlp->layers) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    return out;
}

namespace {

Mlp make_mlp(const std::vector<std::size_t>& widths, Rng& rng) {
    Mlp mlp;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        const auto fan_in = widths[i], fan_out = widths[i + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        Linear layer;
        layer.weight = Tensor::zeros({fan_in, fan_out});
        for (auto& w : layer.weight.data) w = rng.uniform(-bound, bound);
        layer.bias = Tensor::zeros({fan_out});
        layer.weight.requires_grad = true;
        layer.bias.requires_grad = true;
        mlp.layers.push_back(std::move(layer));
    }
    return mlp;
}

}  // namespace

Autoencoder make_model(const ModelConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(seed, RngStream::init);
    Autoencoder model;
    model.config = config;

    std::vector<std::size_t> enc{config.input_dim};
    enc.insert(enc.end(), config.hidden_sizes.begin(), config.hidden_sizes.end());
    enc.push_back(config.encoder_output_dim());
    model.encoder = make_mlp(enc, rng);

    std::vector<std::size_t> dec{config.decoder_input_dim()};
    dec.insert(dec.end(), config.hidden_sizes.rbegin(), config.hidden_sizes.rend());
    dec.push_back(config.input_dim);
    model.decoder = make_mlp(dec, rng);

    model.minmax = MovingMinMaxState::initial(config.latent_dim, config.minmax_init_delta);
    return model;
}

Var encode(Tape& tape, Autoencoder& model, const Var& x) {
    if (x.cols() != model.config.input_dim) {
        throw DimensionError("encode: input " + shape_string(x.shape()) + " does not match input_dim " +
                             std::to_string(model.config.input_dim));
    }
    return mlp_forward(tape, model.encoder, x, model.config.leaky_slope, OutputActivation::linear);
}

Var batch_minmax(const Var& code, MovingMinMaxState& state, const ModelConfig& config, Mode mode) {
    const std::size_t n = code.cols();
    if (state.moving_min.size() != n || state.moving_max.size() != n) {
        throw DimensionError("batch_minmax: state tracks " + std::to_string(state.moving_min.size()) +
                             " features, code has " + std::to_string(n));
    }
    std::vector<double> lo, hi;
    if (mode == Mode::train) {
        if (code.rows() < 2) {
            throw BatchTooSmallError("batch_minmax: train mode needs at least 2 rows, got " +
                                     std::to_string(code.rows()));
        }
        lo = ops::per_feature_min(code).value().data;
        hi = ops::per_feature_max(code).value().data;
        const double rho = config.minmax_momentum;
        for (std::size_t j = 0; j < n; ++j) {
            state.moving_min[j] = (1.0 - rho) * state.moving_min[j] + rho * lo[j];
            state.moving_max[j] = (1.0 - rho) * state.moving_max[j] + rho * hi[j];
        }
    } else {
        lo = state.moving_min;
        hi = state.moving_max;
    }
    std::vector<double> factor(n);
    for (std::size_t j = 0; j < n; ++j) factor[j] = 1.0 / (hi[j] - lo[j] + config.minmax_eps);
    return ops::column_affine(code, lo, factor);
}

Var lambda_scale(const Var& y, const LambdaVector& lambda) {
    if (y.cols() != lambda.size()) {
        throw DimensionError("lambda_scale: Λ has " + std::to_string(lambda.size()) + " entries, code " +
                             shape_string(y.shape()));
    }
    const std::vector<double> zero(lambda.size(), 0.0);
    return ops::column_affine(y, zero, lambda.weights);
}

std::vector<double> interpolation_widths(std::span<const double> column) {
    const std::size_t m = column.size();
    if (m < 2) throw BatchTooSmallError("interpolation needs at least 2 rows, got " + std::to_string(m));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return column[a] < column[b]; });
    std::vector<double> w(m);
    for (std::size_t r = 0; r < m; ++r) {
        double best = std::numeric_limits<double>::infinity();
        if (r > 0) best = std::min(best, column[order[r]] - column[order[r - 1]]);
        if (r + 1 < m) best = std::min(best, column[order[r + 1]] - column[order[r]]);
        w[order[r]] = best;
    }
    return w;
}

Var interpolate(const Var& y, Rng& rng, Mode mode) {
    if (mode == Mode::eval) return y;
    const std::size_t m = y.rows(), n = y.cols();
    if (m < 2) throw BatchTooSmallError("interpolate: train mode needs at least 2 rows, got " + std::to_string(m));
    const auto& v = y.value().data;
    Tensor noise = Tensor::zeros({m, n});
    std::vector<double> column(m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) column[i] = v[i * n + j];
        const auto w = interpolation_widths(column);
        for (std::size_t i = 0; i < m; ++i) noise.data[i * n + j] = w[i];
    }
    // Row-major draw order keeps the noise stream independent of the width computation.
    for (auto& e : noise.data) e *= rng.normal();
    return ops::add(y, y.tape().constant(std::move(noise)));
}

Var euler_map(const Var& y) { return ops::interleave_columns(ops::cos2pi(y), ops::sin2pi(y)); }

Var decode(Tape& tape, Autoencoder& model, const Var& code) {
    if (code.cols() != model.config.decoder_input_dim()) {
        throw DimensionError("decode: code " + shape_string(code.shape()) + " does not match decoder width " +
                             std::to_string(model.config.decoder_input_dim()));
    }
    return mlp_forward(tape, model.decoder, code, model.config.leaky_slope, OutputActivation::sigmoid);
}

ForwardResult dae_forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode) {
    const Var raw = encode(tape, model, x);
    const Var normalized = batch_minmax(raw, model.minmax, model.config, mode);
    const Var scaled = lambda_scale(normalized, model.config.lambda);
    const Var noisy = interpolate(scaled, rng, mode);
    ForwardResult out;
    out.reconstruction = decode(tape, model, euler_map(noisy));
    out.latent = scaled;
    return out;
}

ForwardResult ae_forward(Tape& tape, Autoencoder& model, const Var& x) {
    ForwardResult out;
    out.latent = encode(tape, model, x);
    out.reconstruction = decode(tape, model, out.latent);
    return out;
}

ForwardResult vae_forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode) {
    const std::size_t n = model.config.latent_dim;
    const Var stats = encode(tape, model, x);
    ForwardResult out;
    out.mu = ops::slice_columns(stats, 0, n);
    out.log_var = ops::slice_columns(stats, n, 2 * n);
    Var z = out.mu;
    if (mode == Mode::train) {
        Tensor eps = Tensor::zeros(out.mu.shape());
        for (auto& e : eps.data) e = rng.normal();
        const Var sigma = ops::exp(ops::scale(out.log_var, 0.5));
        z = ops::add(out.mu, ops::mul(sigma, tape.constant(std::move(eps))));
    }
    out.latent = out.mu;
    out.reconstruction = decode(tape, model, z);
    return out;
}

ForwardResult forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode) {
    switch (model.config.kind) {
        case ModelKind::dae: return dae_forward(tape, model, x, rng, mode);
        case ModelKind::ae: return ae_forward(tape, model, x);
        case ModelKind::vae:
        case ModelKind::beta_vae: return vae_forward(tape, model, x, rng, mode);
    }
    throw ContractError("forward: unknown model kind");
}

Var decode_dae_code(Tape& tape, Autoencoder& model, const Var& code) {
    return decode(tape, model, euler_map(code));
}

Var kl_divergence(const Var& mu, const Var& log_var) {
    const Var terms = ops::sub(ops::add_scalar(ops::add(ops::mul(mu, mu), ops::exp(log_var)), -1.0), log_var);
    return ops::scale(ops::sum(terms), 0.5 / static_cast<double>(mu.rows()));
}

Var vae_loss(ops::LossKind kind, const Var& reconstruction, const Var& target, const Var& mu,
             const Var& log_var, double beta) {
    const double width = static_cast<double>(reconstruction.cols());
    const Var recon = ops::scale(ops::reconstruction_loss(kind, reconstruction, target), width);
    return ops::add(recon, ops::scale(kl_divergence(mu, log_var), beta));
}

Var model_loss(const Autoencoder& model, const ForwardResult& result, const Var& target) {
    if (model.config.is_vae()) {
        return vae_loss(model.config.loss_kind, result.reconstruction, target, result.mu, result.log_var,
                        model.config.beta);
    }
    return ops::reconstruction_loss(model.config.loss_kind, result.reconstruction, target);
}

Tensor rows_to_tensor(std::span<const float> images, std::size_t input_dim, std::span<const std::size_t> rows) {
    Tensor out = Tensor::zeros({rows.size(), input_dim});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto* src = images.data() + rows[r] * input_dim;
        std::copy(src, src + input_dim, out.data.begin() + static_cast<std::ptrdiff_t>(r * input_dim));
    }
    return out;
}

LatentMatrix encode_latents(Autoencoder& model, std::span<const float> images, std::size_t rows,
                            std::size_t batch_size) {
    const std::size_t d = model.config.input_dim;
    if (images.size() != rows * d) {
        throw DimensionError("encode_latents: " + std::to_string(images.size()) + " values for " +
                             std::to_string(rows) + " rows of width " + std::to_string(d));
    }
    const std::size_t n = model.config.latent_dim;
    LatentMatrix out(rows, n);
    Rng unused(0);
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < rows; start += batch_size) {
        const std::size_t stop = std::min(rows, start + batch_size);
        idx.resize(stop - start);
        std::iota(idx.begin(), idx.end(), start);
        Tape tape;
        const Var x = tape.constant(rows_to_tensor(images, d, idx));
        Var latent;
        switch (model.config.kind) {
            case ModelKind::dae:
                latent = lambda_scale(batch_minmax(encode(tape, model, x), model.minmax, model.config, Mode::eval),
                                      model.config.lambda);
                break;
            case ModelKind::ae: latent = encode(tape, model, x); break;
            default: latent = forward(tape, model, x, unused, Mode::eval).latent; break;
        }
        const auto& v = latent.value().data;
        std::copy(v.begin(), v.end(), out.values.begin() + static_cast<std::ptrdiff_t>(start * n));
    }
    return out;
}

}  // namespace daelab
