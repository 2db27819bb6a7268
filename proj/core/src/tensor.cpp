#include "daelab/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "daelab/errors.hpp"

namespace daelab {

std::size_t shape_size(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += "x";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (shape_size(shape) != data.size()) {
        throw DimensionError("tensor shape " + shape_string(shape) + " does not match " +
                             std::to_string(data.size()) + " values");
    }
}

Tensor Tensor::zeros(Shape shape) { return filled(std::move(shape), 0.0); }

Tensor Tensor::filled(Shape shape, double value) {
    const auto n = shape_size(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data) {
    return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::vector(std::vector<double> data) {
    const auto n = data.size();
    return Tensor({n}, std::move(data));
}

std::size_t Tensor::rows() const {
    if (shape.size() == 2) return shape[0];
    if (shape.size() <= 1) return 1;
    throw DimensionError("expected a matrix, got shape " + shape_string(shape));
}

std::size_t Tensor::cols() const {
    if (shape.size() == 2) return shape[1];
    if (shape.size() == 1) return shape[0];
    if (shape.empty()) return 1;
    throw DimensionError("expected a matrix, got shape " + shape_string(shape));
}

double Tensor::item() const {
    if (data.size() != 1) {
        throw DimensionError("item() on tensor of shape " + shape_string(shape));
    }
    return data[0];
}

void Tensor::zero_grad() {
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
}

std::span<double> Tensor::grad_span() {
    if (!grad) grad.emplace(data.size(), 0.0);
    return *grad;
}

}  // namespace daelab
