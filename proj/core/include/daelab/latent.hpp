#pragma once

#include <cstddef>
#include <vector>

namespace daelab {

/// Row-aligned sample × latent-dimension codes.
struct LatentMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    LatentMatrix() = default;
    LatentMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
    LatentMatrix(std::size_t r, std::size_t c, std::vector<double> v) : rows(r), cols(c), values(std::move(v)) {}

    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
        return out;
    }
};

}  // namespace daelab
