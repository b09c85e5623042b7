#include "canopy/train/sgd.hpp"

#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::train {

void sgd_step(OptimizerState& state, std::span<const double> grad,
              const SgdParams& params) {
    if (state.p.size() != state.v.size())
        throw DomainError("parameter and velocity lengths differ");
    if (grad.size() != state.p.size())
        throw DomainError("gradient length does not match parameters");
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i]))
            throw DomainError("non-finite gradient at index " + std::to_string(i) +
                              "; step refused");

    for (std::size_t i = 0; i < state.p.size(); ++i) {
        const double v_next = params.momentum * state.v[i] -
                              params.learning_rate * grad[i] -
                              params.weight_decay * params.learning_rate * state.p[i];
        state.v[i] = v_next;
        state.p[i] += v_next;
    }
    ++state.t;
}

} // namespace canopy::train
