#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "daelab/datasets.hpp"
#include "daelab/metrics.hpp"
#include "daelab/model.hpp"

namespace daelab {

/// The five disentanglement scores plus run metadata and per-factor probes.
struct MetricReport {
    double z_diff = 0.0;
    double z_var = 0.0;
    double dci_rf = 0.0;
    double jemmig = 0.0;
    double dcimig = 0.0;

    std::uint64_t seed = 0;
    std::size_t bins = 0;
    std::size_t samples = 0;
    std::size_t train_points = 0;
    std::size_t test_points = 0;
    std::size_t batch_size = 0;
    std::string variant;
    std::string model;

    std::vector<std::string> factor_names;
    std::vector<ProbeReport> probes;  // one per factor with at least one valid pair
};

// Scores precomputed codes. Each score draws from its own stream of `seed`.
MetricReport score_latents(const LatentMatrix& z, const FactorMatrix& v, const MetricConfig& config,
                           std::uint64_t seed);

// Encodes the whole dataset in eval mode and scores it.
// Throws DimensionError if the checkpoint and dataset disagree on input width
// or factor count.
MetricReport evaluate_model(Autoencoder& model, const FactorDataset& dataset, const MetricConfig& config,
                            std::uint64_t seed);

ProbeReport equivariance_probe(Autoencoder& model, const FactorDataset& dataset, std::size_t k, std::size_t step = 1);

// "key: value" lines.
std::string format_report_text(const MetricReport& report);
// Header and data row sharing one column order.
std::string report_csv_header(const MetricReport& report);
std::string report_csv_row(const MetricReport& report);

}  // namespace daelab
