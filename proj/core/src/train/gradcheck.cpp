#include "canopy/train/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "canopy/util/rng.hpp"

namespace canopy::train {

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

namespace {

void track(GradCheckReport& r, double analytic, double numeric) {
    r.max_rel_err = std::max(r.max_rel_err, relative_error(analytic, numeric));
    ++r.checks;
}

// Central difference of f in coordinate i of v.
template <typename F>
double central_diff(std::vector<double>& v, std::size_t i, F&& f) {
    const double saved = v[i];
    v[i] = saved + kFiniteDiffStep;
    const double hi = f();
    v[i] = saved - kFiniteDiffStep;
    const double lo = f();
    v[i] = saved;
    return (hi - lo) / (2.0 * kFiniteDiffStep);
}

} // namespace

GradCheckReport check_box_loss_gradient(const BoxLossParams& params,
                                        const BoxSlots& pred, const BoxSlots& target,
                                        BoxLossForm form) {
    GradCheckReport report;
    BoxSlots p = pred;
    const BoxSlots grad = box_loss_grad(params, p, target, form);

    std::vector<double>* channels[] = {&p.x, &p.y, &p.w, &p.h};
    const std::vector<double>* grads[] = {&grad.x, &grad.y, &grad.w, &grad.h};
    for (int c = 0; c < 4; ++c) {
        std::vector<double>& v = *channels[c];
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double numeric = central_diff(v, i, [&] { return box_loss(params, p, target, form); });
            track(report, (*grads[c])[i], numeric);
        }
    }
    return report;
}

GradCheckReport check_bce_gradient(const MaskPair& m) {
    GradCheckReport report;
    MaskPair probe = m;
    const std::vector<double> grad = bce_mask_grad(probe);
    for (std::size_t i = 0; i < probe.p.size(); ++i) {
        const double numeric = central_diff(probe.p, i, [&] { return bce_mask_loss(probe); });
        track(report, grad[i], numeric);
    }
    return report;
}

GradCheckReport sweep_box_loss(int instances, std::uint64_t seed, BoxLossForm form) {
    Rng rng = Rng::stream(seed, "gradcheck.box");
    GradCheckReport total;
    BoxLossParams params;
    params.grid_size = 4;
    params.anchors_per_cell = 2;
    const std::size_t n = params.slot_count();
    for (int k = 0; k < instances; ++k) {
        BoxSlots pred, target;
        for (std::vector<double>* v : {&pred.x, &pred.y, &pred.w, &pred.h,
                                       &target.x, &target.y, &target.w, &target.h}) {
            v->resize(n);
            for (double& x : *v) x = rng.uniform(-2.0, 2.0);
        }
        params.obj.resize(n);
        for (std::uint8_t& o : params.obj) o = rng.bernoulli(0.5) ? 1 : 0;
        const GradCheckReport r = check_box_loss_gradient(params, pred, target, form);
        total.max_rel_err = std::max(total.max_rel_err, r.max_rel_err);
        total.checks += r.checks;
    }
    return total;
}

GradCheckReport sweep_bce(int instances, std::uint64_t seed) {
    Rng rng = Rng::stream(seed, "gradcheck.bce");
    GradCheckReport total;
    const std::size_t pixels = 48;
    for (int k = 0; k < instances; ++k) {
        std::vector<std::uint8_t> y(pixels);
        std::vector<double> p(pixels);
        for (std::size_t i = 0; i < pixels; ++i) {
            y[i] = rng.bernoulli(0.5) ? 1 : 0;
            // Keep probabilities away from the clamp edges so the finite
            // difference probes the smooth region.
            p[i] = rng.uniform(0.05, 0.95);
        }
        const GradCheckReport r = check_bce_gradient(make_mask_pair(y, p));
        total.max_rel_err = std::max(total.max_rel_err, r.max_rel_err);
        total.checks += r.checks;
    }
    return total;
}

} // namespace canopy::train
