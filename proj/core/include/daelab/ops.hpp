#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "daelab/tape.hpp"

// Differentiable operations over Tape values. Binary elementwise ops require
// equal shapes; the only implicit expansion is a scalar operand.
namespace daelab::ops {

Var matmul(const Var& a, const Var& b);

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double factor);
Var add_scalar(const Var& x, double value);

Var leaky_relu(const Var& x, double slope);
Var sigmoid(const Var& x);
Var sin2pi(const Var& x);
Var cos2pi(const Var& x);
Var exp(const Var& x);

// x[m×n] + bias[n] row by row; the layer bias of an affine map.
Var add_bias(const Var& x, const Var& bias);

// (x[:, j] - shift[j]) * factor[j] with shift and factor held constant.
Var column_affine(const Var& x, std::span<const double> shift, std::span<const double> factor);

// Columns [begin, end) of x.
Var slice_columns(const Var& x, std::size_t begin, std::size_t end);

// [a0, b0, a1, b1, ...] column interleaving of two equally shaped matrices.
Var interleave_columns(const Var& a, const Var& b);

Var sum(const Var& x);
Var mean(const Var& x);

// Batch-axis reductions of an m×n matrix to a length-n vector. Gradient-stopping.
Var per_feature_min(const Var& x);
Var per_feature_max(const Var& x);

enum class LossKind { mse, bce };

inline constexpr double kBceClamp = 1e-7;

Var mse_loss(const Var& prediction, const Var& target);
// Mean binary cross-entropy; prediction clamped to [1e-7, 1 - 1e-7].
Var bce_loss(const Var& prediction, const Var& target);
Var reconstruction_loss(LossKind kind, const Var& prediction, const Var& target);

}  // namespace daelab::ops
