#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "daelab/rng.hpp"

namespace daelab {

/// Top-k singular values of a mean-centered data matrix, descending.
struct SingularSpectrum {
    std::vector<double> values;
    std::size_t k = 0;
};

/// Per-feature latent scale factors; each weight is 1.0 or alpha.
struct LambdaVector {
    std::vector<double> weights;
    double alpha = 0.0;

    std::size_t size() const noexcept { return weights.size(); }
};

struct PcaOptions {
    std::size_t power_iterations = 40;
    std::size_t oversampling = 8;
    // Larger inputs are replaced by a seeded uniform row subsample of this size.
    std::size_t max_rows = 10'000;
};

// Randomized subspace iteration on the column-centered N×D row-major matrix.
// Throws ArgumentError unless N >= 2 and 1 <= k <= min(N, D).
SingularSpectrum top_singular_values(std::span<const double> data, std::size_t rows, std::size_t cols,
                                     std::size_t k, Rng& rng, const PcaOptions& options = {});
SingularSpectrum top_singular_values(std::span<const float> data, std::size_t rows, std::size_t cols,
                                     std::size_t k, Rng& rng, const PcaOptions& options = {});

// Rounds to one decimal place, ties away from zero.
double round_one_decimal(double value);

// S / max(S). Throws DegenerateError for an all-zero spectrum.
std::vector<double> relative_spectrum(const SingularSpectrum& spectrum);

// S̄ = S / max(S), rounded to one decimal; rounded entries below 1 become alpha.
// Throws DegenerateError for an all-zero spectrum and ArgumentError unless 0 < alpha < 1.
LambdaVector compute_lambda(const SingularSpectrum& spectrum, double alpha);

}  // namespace daelab
