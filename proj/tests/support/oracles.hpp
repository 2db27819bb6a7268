#pragma once

#include <cstdint>
#include <vector>

#include "daelab/metrics.hpp"
#include "daelab/rng.hpp"

namespace daelab::testing {

// Factors drawn i.i.d. uniform over their cardinalities.
inline FactorMatrix random_factors(std::size_t rows, const std::vector<std::uint32_t>& cards, Rng& rng) {
    FactorMatrix v;
    v.rows = rows;
    v.cardinalities = cards;
    v.labels.resize(rows * cards.size());
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cards.size(); ++k)
            v.labels[i * cards.size() + k] = static_cast<std::uint32_t>(rng.below(cards[k]));
    return v;
}

// Every factor combination once, last factor fastest.
inline FactorMatrix exhaustive_factors(const std::vector<std::uint32_t>& cards) {
    FactorMatrix v;
    v.cardinalities = cards;
    v.rows = 1;
    for (auto c : cards) v.rows *= c;
    v.labels.resize(v.rows * cards.size());
    for (std::size_t i = 0; i < v.rows; ++i) {
        std::size_t rest = i;
        for (std::size_t k = cards.size(); k-- > 0;) {
            v.labels[i * cards.size() + k] = static_cast<std::uint32_t>(rest % cards[k]);
            rest /= cards[k];
        }
    }
    return v;
}

// One code dimension per factor holding label / (cardinality - 1).
inline LatentMatrix identity_codes(const FactorMatrix& v) {
    LatentMatrix z(v.rows, v.num_factors());
    for (std::size_t i = 0; i < v.rows; ++i)
        for (std::size_t k = 0; k < v.num_factors(); ++k)
            z.at(i, k) = v.cardinalities[k] > 1 ? v.label(i, k) / (v.cardinalities[k] - 1.0) : 0.0;
    return z;
}

// U(0,1) codes independent of the factors.
inline LatentMatrix noise_codes(std::size_t rows, std::size_t cols, Rng& rng) {
    LatentMatrix z(rows, cols);
    for (auto& x : z.values) x = rng.uniform();
    return z;
}

inline LatentMatrix permute_columns(const LatentMatrix& z, const std::vector<std::size_t>& perm) {
    LatentMatrix out(z.rows, z.cols);
    for (std::size_t i = 0; i < z.rows; ++i)
        for (std::size_t j = 0; j < z.cols; ++j) out.at(i, j) = z.at(i, perm[j]);
    return out;
}

}  // namespace daelab::testing
