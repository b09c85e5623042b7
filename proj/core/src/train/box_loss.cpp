#include "canopy/train/box_loss.hpp"

#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::train {

void BoxLossParams::validate() const {
    if (grid_size < 1) throw DomainError("grid_size must be >= 1");
    if (anchors_per_cell < 1) throw DomainError("anchors_per_cell must be >= 1");
    if (obj.size() != slot_count())
        throw DomainError("obj must have grid_size^2 * anchors_per_cell entries");
    for (double l : {lambda_coord, lambda_x, lambda_y, lambda_w, lambda_h})
        if (!(l >= 0.0) || !std::isfinite(l))
            throw DomainError("loss coefficients must be finite and non-negative");
}

namespace {

void check_slots(const BoxLossParams& params, const BoxSlots& s, const char* name) {
    const std::size_t n = params.slot_count();
    if (s.x.size() != n || s.y.size() != n || s.w.size() != n || s.h.size() != n)
        throw DomainError(std::string(name) + " slot vectors must all have " +
                          std::to_string(n) + " entries");
    for (const auto* v : {&s.x, &s.y, &s.w, &s.h})
        for (double d : *v)
            if (!std::isfinite(d))
                throw DomainError(std::string(name) + " contains a non-finite value");
}

double penalty(double d, BoxLossForm form) {
    if (form == BoxLossForm::squared) return d * d;
    const double a = std::abs(d);
    return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

double penalty_derivative(double d, BoxLossForm form) {
    if (form == BoxLossForm::squared) return 2.0 * d;
    if (std::abs(d) < 1.0) return d;
    return d > 0.0 ? 1.0 : -1.0;
}

} // namespace

double box_loss(const BoxLossParams& params, const BoxSlots& pred,
                const BoxSlots& target, BoxLossForm form) {
    params.validate();
    check_slots(params, pred, "prediction");
    check_slots(params, target, "target");

    double acc = 0.0;
    for (std::size_t i = 0; i < params.slot_count(); ++i) {
        if (!params.obj[i]) continue;
        acc += params.lambda_x * penalty(pred.x[i] - target.x[i], form) +
               params.lambda_y * penalty(pred.y[i] - target.y[i], form) +
               params.lambda_w * penalty(pred.w[i] - target.w[i], form) +
               params.lambda_h * penalty(pred.h[i] - target.h[i], form);
    }
    return params.lambda_coord * acc;
}

BoxSlots box_loss_grad(const BoxLossParams& params, const BoxSlots& pred,
                       const BoxSlots& target, BoxLossForm form) {
    params.validate();
    check_slots(params, pred, "prediction");
    check_slots(params, target, "target");

    const std::size_t n = params.slot_count();
    BoxSlots g;
    g.x.assign(n, 0.0);
    g.y.assign(n, 0.0);
    g.w.assign(n, 0.0);
    g.h.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!params.obj[i]) continue;
        const double c = params.lambda_coord;
        g.x[i] = c * params.lambda_x * penalty_derivative(pred.x[i] - target.x[i], form);
        g.y[i] = c * params.lambda_y * penalty_derivative(pred.y[i] - target.y[i], form);
        g.w[i] = c * params.lambda_w * penalty_derivative(pred.w[i] - target.w[i], form);
        g.h[i] = c * params.lambda_h * penalty_derivative(pred.h[i] - target.h[i], form);
    }
    return g;
}

} // namespace canopy::train
