#pragma once

#include <algorithm>
#include <cmath>

#include "daelab/model.hpp"

namespace daelab::testing {

// Eval-mode training loss of `model` on x (stochastic stages are inactive).
inline double eval_loss(Autoencoder& model, const Tensor& x) {
    Tape tape;
    Rng rng(0, RngStream::noise);
    const auto input = tape.constant(x);
    const auto result = forward(tape, model, input, rng, Mode::eval);
    return model_loss(model, result, input).value().item();
}

// Relative error of the reverse-mode gradient of the eval-mode loss with
// respect to every encoder and decoder parameter, against central differences.
inline double model_gradient_relative_error(Autoencoder model, const Tensor& x, double h = 1e-5) {
    for (Tensor* p : model.parameters()) p->grad.reset();
    {
        Tape tape;
        Rng rng(0, RngStream::noise);
        const auto input = tape.constant(x);
        const auto result = forward(tape, model, input, rng, Mode::eval);
        tape.backward(model_loss(model, result, input));
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (Tensor* p : model.parameters()) {
        const std::vector<double> analytic = p->grad ? *p->grad : std::vector<double>(p->size(), 0.0);
        for (std::size_t i = 0; i < p->size(); ++i) {
            const double saved = p->data[i];
            p->data[i] = saved + h;
            const double up = eval_loss(model, x);
            p->data[i] = saved - h;
            const double down = eval_loss(model, x);
            p->data[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            diff += (analytic[i] - numeric) * (analytic[i] - numeric);
            na += analytic[i] * analytic[i];
            nn += numeric * numeric;
        }
    }
    return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
}

}  // namespace daelab::testing
