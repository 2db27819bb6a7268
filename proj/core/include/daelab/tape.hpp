#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "daelab/tensor.hpp"

namespace daelab {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
public:
    Var() = default;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    const Tensor& value() const;
    const Shape& shape() const { return value().shape; }
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
    std::size_t id() const noexcept { return id_; }
    Tape& tape() const { return *tape_; }

    // Gradient of the last backward() pass w.r.t. this node; zeros if none reached it.
    std::vector<double> grad() const;

private:
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Linear record of executed operations.
///
/// Nodes are appended in execution order, so every input id is smaller than
/// the id of its consumer and a single reverse sweep is a valid topological
/// traversal. Storage is a deque so references to recorded values stay valid
/// while the tape grows.
class Tape {
public:
    // Receives the gradient flowing into the node's output.
    using BackwardFn = std::function<void(std::span<const double> out_grad)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);

    // Leaf bound to a parameter; backward() accumulates into parameter.grad.
    Var watch(Tensor& parameter);

    // Appends an op result. `backward` may be empty for gradient-stopping nodes.
    Var record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward);

    void backward(const Var& loss);

    const Tensor& value(std::size_t id) const { return nodes_.at(id).value; }
    bool needs_grad(std::size_t id) const { return nodes_.at(id).needs_grad; }

    // Gradient accumulator of a node, allocated on first use.
    std::span<double> grad_buffer(std::size_t id);
    std::vector<double> grad_of(std::size_t id) const;

    std::size_t size() const noexcept { return nodes_.size(); }
    void clear() { nodes_.clear(); }

private:
    struct Node {
        Tensor value;
        std::vector<std::size_t> inputs;
        BackwardFn backward;
        Tensor* parameter = nullptr;
        bool needs_grad = false;
        std::vector<double> grad;
    };

    std::deque<Node> nodes_;
};

}  // namespace daelab
