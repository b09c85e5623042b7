#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canopy/train/sgd.hpp"

namespace canopy::train {

enum class ToyProblem {
    quadratic_bowl, // J(p) = 0.5 * ||p||^2, grad = p, start (1, 1)
    mask_logits,    // tiny logistic mask head on a fixed synthetic patch
};

ToyProblem toy_problem_from_name(const std::string& name);

struct FitResult {
    std::vector<double> loss;   // loss before each step, loss[0] = initial
    std::vector<double> params; // final parameter vector
    bool diverged = false;
    int divergence_step = -1;   // first step whose loss exceeded the guard
};

inline constexpr double kDivergenceGuard = 1e12;

// Runs `steps` SGD updates and records the loss trajectory.
FitResult fit_toy(ToyProblem problem, const SgdParams& opt, int steps,
                  std::uint64_t seed = 7);

} // namespace canopy::train
