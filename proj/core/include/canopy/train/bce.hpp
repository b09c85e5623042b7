#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace canopy::train {

// Probability clamp for the cross-entropy; raw 0/1 probabilities would
// produce infinities.
inline constexpr double kProbEps = 1e-7;

struct MaskPair {
    std::vector<std::uint8_t> y; // ground truth in {0, 1}
    std::vector<double> p;       // probabilities, clamped to [eps, 1-eps]
};

// Validates lengths/values and clamps p into [kProbEps, 1 - kProbEps].
MaskPair make_mask_pair(std::span<const std::uint8_t> y, std::span<const double> p);

// -(1/N) * sum(y*ln p + (1-y)*ln(1-p))
double bce_mask_loss(const MaskPair& m);

// d(loss)/dp_i = -(1/N) * (y_i/p_i - (1-y_i)/(1-p_i))
std::vector<double> bce_mask_grad(const MaskPair& m);

} // namespace canopy::train
