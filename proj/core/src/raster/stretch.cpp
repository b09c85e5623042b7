#include "canopy/raster/stretch.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::raster {

double percentile(std::span<const std::uint16_t> samples, double pct) {
    if (samples.empty()) throw DomainError("percentile of empty sample set");
    std::vector<std::uint16_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return static_cast<double>(sorted.back());
    return static_cast<double>(sorted[i]) * (1.0 - frac) +
           static_cast<double>(sorted[i + 1]) * frac;
}

std::vector<std::uint8_t> stretch_to_8bit(std::span<const std::uint16_t> samples,
                                          double low_pct, double high_pct) {
    if (samples.empty()) throw DomainError("stretch_to_8bit on empty input");
    if (!(low_pct >= 0.0 && low_pct < high_pct && high_pct <= 100.0))
        throw DomainError("percentiles must satisfy 0 <= low < high <= 100");

    const double lo = percentile(samples, low_pct);
    const double hi = percentile(samples, high_pct);

    std::vector<std::uint8_t> out(samples.size());
    if (!(hi > lo)) return out; // constant (or collapsed) input -> all zeros

    const double scale = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = (static_cast<double>(samples[i]) - lo) * scale;
        out[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

} // namespace canopy::raster
