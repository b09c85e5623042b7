#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace canopy::train {

struct OptimizerState {
    std::vector<double> p; // parameters
    std::vector<double> v; // velocity, same length
    std::int64_t t = 0;    // completed steps
};

struct SgdParams {
    double learning_rate = 0.01;
    double momentum = 0.938;
    double weight_decay = 0.0005;
};

// v' = momentum*v - lr*g - weight_decay*lr*p;  p' = p + v'.
// With momentum = weight_decay = 0 this is bit-for-bit plain gradient
// descent. A non-finite gradient refuses the step and leaves the state
// untouched.
void sgd_step(OptimizerState& state, std::span<const double> grad,
              const SgdParams& params);

} // namespace canopy::train
