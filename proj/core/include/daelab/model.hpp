#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "daelab/latent.hpp"
#include "daelab/linalg.hpp"
#include "daelab/ops.hpp"
#include "daelab/rng.hpp"
#include "daelab/tape.hpp"

namespace daelab {

enum class ModelKind : std::uint32_t { dae = 0, ae = 1, vae = 2, beta_vae = 3 };
enum class Mode { train, eval };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
std::string_view to_string(ops::LossKind kind);
ops::LossKind parse_loss_kind(std::string_view name);

/// Architecture and layer hyperparameters shared by the DAE and the baselines.
///
/// `lambda`, the min-max fields and `alpha` only matter for the DAE; `beta`
/// only for the VAE kinds (beta = 1 is the vanilla VAE).
struct ModelConfig {
    ModelKind kind = ModelKind::dae;
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_sizes{256, 64};
    std::size_t latent_dim = 2;
    double alpha = 0.5;
    LambdaVector lambda;
    ops::LossKind loss_kind = ops::LossKind::mse;
    double leaky_slope = 0.01;
    double minmax_momentum = 0.01;
    double minmax_init_delta = 0.01;
    double minmax_eps = 1e-6;
    double beta = 1.0;
    // Factor count of the training dataset; 0 when unknown.
    std::uint32_t factor_count = 0;

    void validate() const;

    std::size_t encoder_output_dim() const;
    // The Euler map doubles the DAE code.
    std::size_t decoder_input_dim() const;
    bool is_vae() const { return kind == ModelKind::vae || kind == ModelKind::beta_vae; }
};

/// Affine layer y = x·W + b with W stored input-major (in × out).
struct Linear {
    Tensor weight;
    Tensor bias;
};

struct Mlp {
    std::vector<Linear> layers;
};

// Leaky-ReLU between layers; the last layer is linear or sigmoid.
enum class OutputActivation { linear, sigmoid };
Var mlp_forward(Tape& tape, Mlp& mlp, const Var& x, double leaky_slope, OutputActivation output);

/// Running per-feature extrema used by batch min-max normalisation at eval time.
struct MovingMinMaxState {
    std::vector<double> moving_min;
    std::vector<double> moving_max;

    // Both extrema start delta away from the middle of [0, 1).
    static MovingMinMaxState initial(std::size_t n, double delta);
};

struct Autoencoder {
    ModelConfig config;
    Mlp encoder;
    Mlp decoder;
    MovingMinMaxState minmax;

    // Declaration order: encoder (W, b) per layer, then decoder.
    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
};

// He-uniform weights from the init stream of `rng`, zero biases.
Autoencoder make_model(const ModelConfig& config, std::uint64_t seed);

// ---- DAE latent pipeline -------------------------------------------------

Var encode(Tape& tape, Autoencoder& model, const Var& x);

// Train: normalise with batch extrema (m >= 2) and fold them into the moving
// state; eval: normalise with the moving state. Extrema are constants for
// the gradient.
Var batch_minmax(const Var& code, MovingMinMaxState& state, const ModelConfig& config, Mode mode);

Var lambda_scale(const Var& y, const LambdaVector& lambda);

// Nearest-other-sample distance of each entry of a column: w_i = min_{j!=i} |v_i - v_j|.
std::vector<double> interpolation_widths(std::span<const double> column);

// Train: y + w ⊙ ε with ε ~ N(0, 1) and w from interpolation_widths per
// feature; eval: identity.
Var interpolate(const Var& y, Rng& rng, Mode mode);

// z -> [cos 2πz₁, sin 2πz₁, ..., cos 2πzₙ, sin 2πzₙ]
Var euler_map(const Var& y);

Var decode(Tape& tape, Autoencoder& model, const Var& code);

struct ForwardResult {
    Var reconstruction;
    // Code used for metrics: post-Λ for the DAE, raw code for the AE, μ for VAEs.
    Var latent;
    // VAE only.
    Var mu;
    Var log_var;
};

ForwardResult dae_forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode);
ForwardResult ae_forward(Tape& tape, Autoencoder& model, const Var& x);
ForwardResult vae_forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode);
ForwardResult forward(Tape& tape, Autoencoder& model, const Var& x, Rng& rng, Mode mode);

// Decodes post-Λ DAE codes (bypassing encoder, normalisation and interpolation).
Var decode_dae_code(Tape& tape, Autoencoder& model, const Var& code);

// Closed-form KL(N(μ, σ²) || N(0, I)), summed over dimensions, averaged over rows.
Var kl_divergence(const Var& mu, const Var& log_var);

// Per-sample reconstruction (mean loss × input_dim) + β·KL.
Var vae_loss(ops::LossKind kind, const Var& reconstruction, const Var& target, const Var& mu,
             const Var& log_var, double beta);

// Reconstruction-only for the DAE and AE; vae_loss for the VAE kinds.
Var model_loss(const Autoencoder& model, const ForwardResult& result, const Var& target);

// Eval-mode latents of every row of a row-major N×input_dim image matrix.
LatentMatrix encode_latents(Autoencoder& model, std::span<const float> images, std::size_t rows,
                            std::size_t batch_size = 256);

Tensor rows_to_tensor(std::span<const float> images, std::size_t input_dim, std::span<const std::size_t> rows);

}  // namespace daelab
