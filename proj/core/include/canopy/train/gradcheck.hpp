#pragma once

#include <cstdint>

#include "canopy/train/bce.hpp"
#include "canopy/train/box_loss.hpp"

namespace canopy::train {

inline constexpr double kFiniteDiffStep = 1e-5;

// |a - b| / max(1, |a|, |b|)
double relative_error(double a, double b);

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checks = 0;
};

// Central finite differences (h = kFiniteDiffStep) against the analytic
// gradients, every coordinate.
GradCheckReport check_box_loss_gradient(const BoxLossParams& params,
                                        const BoxSlots& pred, const BoxSlots& target,
                                        BoxLossForm form = BoxLossForm::squared);
GradCheckReport check_bce_gradient(const MaskPair& m);

// Convenience: the random-instance sweeps behind the verification CLI.
GradCheckReport sweep_box_loss(int instances, std::uint64_t seed, BoxLossForm form);
GradCheckReport sweep_bce(int instances, std::uint64_t seed);

} // namespace canopy::train
