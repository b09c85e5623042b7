#include "canopy/train/bce.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::train {

MaskPair make_mask_pair(std::span<const std::uint8_t> y, std::span<const double> p) {
    if (y.empty()) throw DomainError("mask pair must have at least one pixel");
    if (y.size() != p.size())
        throw DomainError("ground truth and probability lengths differ");
    MaskPair m;
    m.y.assign(y.begin(), y.end());
    m.p.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (y[i] > 1) throw DomainError("ground truth values must be 0 or 1");
        if (!std::isfinite(p[i]))
            throw DomainError("probability at index " + std::to_string(i) +
                              " is not finite");
        m.p.push_back(std::clamp(p[i], kProbEps, 1.0 - kProbEps));
    }
    return m;
}

double bce_mask_loss(const MaskPair& m) {
    if (m.y.empty()) throw DomainError("mask pair must have at least one pixel");
    if (m.y.size() != m.p.size())
        throw DomainError("ground truth and probability lengths differ");
    const double n = static_cast<double>(m.y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < m.y.size(); ++i)
        acc += m.y[i] ? std::log(m.p[i]) : std::log(1.0 - m.p[i]);
    return -acc / n;
}

std::vector<double> bce_mask_grad(const MaskPair& m) {
    if (m.y.empty()) throw DomainError("mask pair must have at least one pixel");
    if (m.y.size() != m.p.size())
        throw DomainError("ground truth and probability lengths differ");
    const double n = static_cast<double>(m.y.size());
    std::vector<double> g(m.y.size());
    for (std::size_t i = 0; i < m.y.size(); ++i) {
        const double term = m.y[i] ? 1.0 / m.p[i] : -1.0 / (1.0 - m.p[i]);
        g[i] = -term / n;
    }
    return g;
}

} // namespace canopy::train
