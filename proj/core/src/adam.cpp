#include "daelab/adam.hpp"

#include <cmath>

#include "daelab/errors.hpp"

namespace daelab {

void adam_step(std::span<Tensor* const> params, AdamState& state) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->grad) {
            throw ContractError("adam_step: parameter " + std::to_string(i) + " has no gradient");
        }
    }
    if (state.first_moment.empty()) {
        for (const Tensor* p : params) {
            state.first_moment.emplace_back(p->size(), 0.0);
            state.second_moment.emplace_back(p->size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) {
        throw ContractError("adam_step: optimizer state tracks " + std::to_string(state.first_moment.size()) +
                            " parameters, got " + std::to_string(params.size()));
    }

    const auto& o = state.options;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(o.beta1, t);
    const double correction2 = 1.0 - std::pow(o.beta2, t);

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        auto& g = *p.grad;
        auto& m = state.first_moment[i];
        auto& v = state.second_moment[i];
        if (m.size() != p.size()) {
            throw ContractError("adam_step: moment buffer of parameter " + std::to_string(i) +
                                " does not match its shape " + shape_string(p.shape));
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = o.beta1 * m[k] + (1.0 - o.beta1) * g[k];
            v[k] = o.beta2 * v[k] + (1.0 - o.beta2) * g[k] * g[k];
            const double m_hat = m[k] / correction1;
            const double v_hat = v[k] / correction2;
            p.data[k] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
            g[k] = 0.0;
        }
    }
}

}  // namespace daelab
