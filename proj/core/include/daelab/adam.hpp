#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "daelab/tensor.hpp"

namespace daelab {

struct AdamOptions {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction. Moment buffers are created lazily on the
/// first step and must keep matching the parameter list afterwards.
struct AdamState {
    AdamOptions options;
    std::uint64_t step = 0;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;

    AdamState() = default;
    explicit AdamState(AdamOptions opts) : options(opts) {}
};

// Applies one update to every parameter and zeroes the gradients.
// Throws ContractError if a parameter has no gradient buffer.
void adam_step(std::span<Tensor* const> params, AdamState& state);

}  // namespace daelab
