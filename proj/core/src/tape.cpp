#include "daelab/tape.hpp"

#include <algorithm>

#include "daelab/errors.hpp"

namespace daelab {

const Tensor& Var::value() const { return tape_->value(id_); }

std::vector<double> Var::grad() const { return tape_->grad_of(id_); }

Var Tape::constant(Tensor value) {
    Node node;
    node.value = std::move(value);
    node.value.requires_grad = false;
    node.value.grad.reset();
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::watch(Tensor& parameter) {
    Node node;
    // Values are copied so later in-place parameter updates cannot alias a
    // recorded forward pass.
    node.value = Tensor(parameter.shape, parameter.data);
    node.parameter = &parameter;
    node.needs_grad = parameter.requires_grad;
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> inputs, BackwardFn backward) {
    Node node;
    node.value = std::move(value);
    if (backward) {
        node.needs_grad = std::any_of(inputs.begin(), inputs.end(),
                                      [this](std::size_t id) { return nodes_.at(id).needs_grad; });
    }
    if (node.needs_grad) node.backward = std::move(backward);
    node.inputs = std::move(inputs);
    nodes_.push_back(std::move(node));
    return Var(this, nodes_.size() - 1);
}

std::span<double> Tape::grad_buffer(std::size_t id) {
    auto& node = nodes_.at(id);
    if (node.grad.empty()) node.grad.assign(node.value.size(), 0.0);
    return node.grad;
}

std::vector<double> Tape::grad_of(std::size_t id) const {
    const auto& node = nodes_.at(id);
    if (node.grad.empty()) return std::vector<double>(node.value.size(), 0.0);
    return node.grad;
}

void Tape::backward(const Var& loss) {
    if (&loss.tape() != this) throw ContractError("backward: loss belongs to another tape");
    const auto root = loss.id();
    if (nodes_.at(root).value.size() != 1) {
        throw ContractError("backward: loss must be scalar, got shape " +
                            shape_string(nodes_.at(root).value.shape));
    }
    for (auto& node : nodes_) node.grad.clear();
    grad_buffer(root)[0] = 1.0;

    for (std::size_t i = root + 1; i-- > 0;) {
        auto& node = nodes_[i];
        if (!node.needs_grad || node.grad.empty()) continue;
        if (node.backward) node.backward(node.grad);
        if (node.parameter) {
            auto dst = node.parameter->grad_span();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += node.grad[k];
        }
    }
}

}  // namespace daelab
