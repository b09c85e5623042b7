#include "canopy/train/fit_toy.hpp"

#include <cmath>
#include <vector>

#include "canopy/train/bce.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

namespace canopy::train {

ToyProblem toy_problem_from_name(const std::string& name) {
    if (name == "quadratic") return ToyProblem::quadratic_bowl;
    if (name == "mask") return ToyProblem::mask_logits;
    throw ConfigError("unknown toy problem '" + name + "' (expected quadratic or mask)");
}

namespace {

struct Objective {
    std::vector<double> start;
    // Fills grad (same length as p) and returns the loss at p.
    virtual double eval(const std::vector<double>& p, std::vector<double>& grad) const = 0;
    virtual ~Objective() = default;
};

struct QuadraticBowl final : Objective {
    QuadraticBowl() { start = {1.0, 1.0}; }
    double eval(const std::vector<double>& p, std::vector<double>& grad) const override {
        double loss = 0.0;
        grad.resize(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            loss += 0.5 * p[i] * p[i];
            grad[i] = p[i];
        }
        return loss;
    }
};

// A single-pixel-head logistic model p = sigmoid(w1*f1 + w2*f2 + b) trained
// against a fixed synthetic 8x8 patch.  Separable by construction, so the
// loss decreases monotonically for any sane learning rate.
struct MaskLogits final : Objective {
    std::vector<double> f1, f2;
    std::vector<std::uint8_t> y;

    explicit MaskLogits(std::uint64_t seed) {
        start = {0.0, 0.0, 0.0};
        Rng rng = Rng::stream(seed, "fit.mask_logits");
        const int side = 8;
        for (int r = 0; r < side; ++r) {
            for (int c = 0; c < side; ++c) {
                const double u = (c + 0.5) / side - 0.5;
                const double v = (r + 0.5) / side - 0.5;
                f1.push_back(u + 0.05 * rng.uniform(-1.0, 1.0));
                f2.push_back(v + 0.05 * rng.uniform(-1.0, 1.0));
                y.push_back(u + v > 0.0 ? 1 : 0);
            }
        }
    }

    double eval(const std::vector<double>& p, std::vector<double>& grad) const override {
        const double w1 = p[0], w2 = p[1], b = p[2];
        const std::size_t n = y.size();
        std::vector<double> prob(n);
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = 1.0 / (1.0 + std::exp(-(w1 * f1[i] + w2 * f2[i] + b)));
        }
        const MaskPair pair = make_mask_pair(y, prob);
        const double loss = bce_mask_loss(pair);
        grad.assign(3, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (prob[i] - y[i]) / static_cast<double>(n);
            grad[0] += d * f1[i];
            grad[1] += d * f2[i];
            grad[2] += d;
        }
        return loss;
    }
};

} // namespace

FitResult fit_toy(ToyProblem problem, const SgdParams& opt, int steps, std::uint64_t seed) {
    if (steps < 0) throw DomainError("fit step count must be non-negative");

    QuadraticBowl bowl;
    MaskLogits mask{seed};
    const Objective& obj = problem == ToyProblem::quadratic_bowl
                               ? static_cast<const Objective&>(bowl)
                               : static_cast<const Objective&>(mask);

    OptimizerState state;
    state.p = obj.start;
    state.v.assign(state.p.size(), 0.0);

    FitResult result;
    std::vector<double> grad;
    for (int step = 0; step <= steps; ++step) {
        const double loss = obj.eval(state.p, grad);
        result.loss.push_back(loss);
        if (!std::isfinite(loss) || loss > kDivergenceGuard) {
            result.diverged = true;
            result.divergence_step = step;
            break;
        }
        if (step == steps) break;
        sgd_step(state, grad, opt);
    }
    result.params = state.p;
    return result;
}

} // namespace canopy::train
