#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "daelab/tape.hpp"
#include "daelab/tensor.hpp"

namespace daelab::testing {

// Builds a scalar loss from watched inputs on a fresh tape.
using LossBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

inline double evaluate_loss(std::vector<Tensor> inputs, const LossBuilder& build) {
    Tape tape;
    std::vector<Var> vars;
    for (auto& t : inputs) vars.push_back(tape.constant(t));
    return build(tape, vars).value().item();
}

// Reverse-mode gradient of every input.
inline std::vector<std::vector<double>> analytic_gradients(std::vector<Tensor> inputs, const LossBuilder& build) {
    Tape tape;
    std::vector<Var> vars;
    for (auto& t : inputs) {
        t.requires_grad = true;
        t.grad.reset();
        vars.push_back(tape.watch(t));
    }
    tape.backward(build(tape, vars));
    std::vector<std::vector<double>> out;
    for (auto& t : inputs) out.push_back(t.grad ? *t.grad : std::vector<double>(t.size(), 0.0));
    return out;
}

// Central differences, one coordinate at a time.
inline std::vector<std::vector<double>> numeric_gradients(const std::vector<Tensor>& inputs, const LossBuilder& build,
                                                          double h) {
    std::vector<std::vector<double>> out;
    for (std::size_t a = 0; a < inputs.size(); ++a) {
        std::vector<double> g(inputs[a].size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto plus = inputs;
            auto minus = inputs;
            plus[a].data[i] += h;
            minus[a].data[i] -= h;
            g[i] = (evaluate_loss(plus, build) - evaluate_loss(minus, build)) / (2.0 * h);
        }
        out.push_back(std::move(g));
    }
    return out;
}

// ‖analytic − numeric‖ / max(‖analytic‖, ‖numeric‖) over all inputs jointly.
inline double gradient_relative_error(const std::vector<Tensor>& inputs, const LossBuilder& build, double h = 1e-5) {
    const auto a = analytic_gradients(inputs, build);
    const auto n = numeric_gradients(inputs, build, h);
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        for (std::size_t i = 0; i < a[k].size(); ++i) {
            diff += (a[k][i] - n[k][i]) * (a[k][i] - n[k][i]);
            na += a[k][i] * a[k][i];
            nn += n[k][i] * n[k][i];
        }
    }
    const double scale = std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
    return std::sqrt(diff) / scale;
}

}  // namespace daelab::testing
