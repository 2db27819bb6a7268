#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace daelab {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major array of doubles with an optional gradient buffer.
///
/// Parameters own their gradient here; intermediate activations live on a
/// Tape and only carry values.
struct Tensor {
    Shape shape;
    std::vector<double> data;
    bool requires_grad = false;
    std::optional<std::vector<double>> grad;

    Tensor() = default;
    Tensor(Shape shape, std::vector<double> data);

    static Tensor zeros(Shape shape);
    static Tensor filled(Shape shape, double value);
    static Tensor scalar(double value);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    static Tensor vector(std::vector<double> data);

    std::size_t size() const noexcept { return data.size(); }
    std::size_t rank() const noexcept { return shape.size(); }

    // 2-D helpers; a rank-1 tensor is treated as a single row.
    std::size_t rows() const;
    std::size_t cols() const;
    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    double item() const;

    void zero_grad();
    std::span<double> grad_span();

    bool same_values(const Tensor& other) const { return shape == other.shape && data == other.data; }
};

}  // namespace daelab
