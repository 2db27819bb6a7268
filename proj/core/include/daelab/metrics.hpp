#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daelab/datasets.hpp"
#include "daelab/information.hpp"
#include "daelab/latent.hpp"
#include "daelab/random_forest.hpp"
#include "daelab/rng.hpp"

namespace daelab {

/// Ground-truth labels aligned row-for-row with a LatentMatrix.
struct FactorMatrix {
    std::size_t rows = 0;
    std::vector<std::uint32_t> cardinalities;
    std::vector<std::uint32_t> labels;  // rows × F

    std::size_t num_factors() const noexcept { return cardinalities.size(); }
    std::uint32_t label(std::size_t i, std::size_t k) const { return labels[i * cardinalities.size() + k]; }
    Labels column(std::size_t k) const;

    static FactorMatrix from_dataset(const FactorDataset& dataset);
    // Throws ArgumentError if a label exceeds its cardinality or sizes disagree.
    void validate() const;
};

struct MetricConfig {
    // Intervention-based scores.
    std::size_t train_points = 500;
    std::size_t test_points = 100;
    std::size_t batch_size = 64;
    // z-diff linear classifier (softmax regression, full-batch gradient descent).
    std::size_t classifier_epochs = 200;
    double classifier_learning_rate = 1.0;
    // Information-based scores.
    std::size_t bins = 20;
    ForestConfig forest;
};

// Higgins-style intervention score: classifier accuracy at predicting which
// factor was held fixed from mean |z(x₁) - z(x₂)| over pairs sharing it.
double z_diff_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng);

// FactorVAE-style majority vote over the lowest-variance (std-normalised) dimension.
double z_var_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng);

// n × F matrix of per-factor forest importances.
std::vector<std::vector<double>> importance_matrix(const LatentMatrix& z, const FactorMatrix& v,
                                                   const ForestConfig& config, Rng& rng);
// DCI disentanglement of an importance matrix: Σ_j ρ_j (1 - H_F(p_j·)).
double dci_disentanglement(const std::vector<std::vector<double>>& importance);
double dci_rf_score(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config, Rng& rng);

double jemmig_score(const LatentMatrix& z, const FactorMatrix& v, std::size_t bins);
double dcimig_score(const LatentMatrix& z, const FactorMatrix& v, std::size_t bins);

/// How a one-step advance of one factor moves the code.
struct ProbeReport {
    std::size_t factor = 0;
    std::size_t step = 1;
    std::size_t pairs = 0;
    std::size_t dominant_dim = 0;
    double alignment_ratio = 0.0;
    std::vector<double> mean_abs_delta;
};

// Pairs every row with the row whose factor k is `step` higher and all other
// factors equal. Throws ArgumentError when no such pair exists.
ProbeReport equivariance_probe(const LatentMatrix& z, const FactorMatrix& v, std::size_t k, std::size_t step = 1);

}  // namespace daelab
