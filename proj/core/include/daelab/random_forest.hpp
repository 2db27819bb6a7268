#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daelab/latent.hpp"
#include "daelab/rng.hpp"

namespace daelab {

struct ForestConfig {
    std::size_t n_trees = 10;
    std::size_t max_depth = 10;
    std::size_t min_leaf = 5;
    double bootstrap_fraction = 1.0;
    // 0 selects ceil(sqrt(n_features)).
    std::size_t features_per_split = 0;
};

/// CART regression tree stored as a flat node array; node 0 is the root.
class RegressionTree {
public:
    struct Node {
        std::int32_t feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        double value = 0.0;
    };

    double predict(std::span<const double> row) const;
    const std::vector<Node>& nodes() const noexcept { return nodes_; }

private:
    friend class RandomForest;
    std::vector<Node> nodes_;
};

/// Bagged regression trees with impurity-decrease feature importances.
class RandomForest {
public:
    // Throws ArgumentError unless rows >= 2·min_leaf and y matches the rows.
    static RandomForest fit(const LatentMatrix& x, std::span<const double> y, const ForestConfig& config, Rng& rng);

    double predict(std::span<const double> row) const;
    std::vector<double> predict(const LatentMatrix& x) const;

    // Total weighted variance reduction per feature, normalised to sum 1;
    // all zeros when no tree split (e.g. a constant target).
    const std::vector<double>& importances() const noexcept { return importances_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

private:
    std::vector<RegressionTree> trees_;
    std::vector<double> importances_;
};

// Coefficient of determination; 0 when y is constant.
double r_squared(std::span<const double> y, std::span<const double> prediction);

}  // namespace daelab
