#pragma once

#include <cstdint>
#include <vector>

namespace canopy::train {

// Which per-term penalty the box loss applies. The squared form is the
// default; smooth-L1 is selectable because the two appear interchangeably
// in the wild for this loss family.
enum class BoxLossForm { squared, smooth_l1 };

struct BoxLossParams {
    int grid_size = 1;        // S: the loss sums over S^2 cells
    int anchors_per_cell = 1; // B
    std::vector<std::uint8_t> obj; // responsibility indicator per (cell, anchor)
    double lambda_coord = 1.0;
    double lambda_x = 1.0;
    double lambda_y = 1.0;
    double lambda_w = 1.0;
    double lambda_h = 1.0;

    std::size_t slot_count() const {
        return static_cast<std::size_t>(grid_size) * grid_size * anchors_per_cell;
    }
    void validate() const;
};

// Per-slot coordinates, one vector entry per (cell, anchor) slot:
// predictions t_x..t_h or targets b_x..b_h.
struct BoxSlots {
    std::vector<double> x, y, w, h;
};

// lambda_coord * sum over slots of obj * (lambda_x*f(t_x-b_x) + ... ), with
// f the squared or smooth-L1 penalty.
double box_loss(const BoxLossParams& params, const BoxSlots& pred,
                const BoxSlots& target, BoxLossForm form = BoxLossForm::squared);

// Analytic d(loss)/d(pred) for every slot coordinate.
BoxSlots box_loss_grad(const BoxLossParams& params, const BoxSlots& pred,
                       const BoxSlots& target,
                       BoxLossForm form = BoxLossForm::squared);

} // namespace canopy::train
