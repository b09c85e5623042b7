#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace canopy::raster {

// Linear-interpolation percentile over the sorted samples
// (position = pct/100 * (n-1)).
double percentile(std::span<const std::uint16_t> samples, double pct);

// Percentile contrast stretch to 8 bits: values at/below the low percentile
// map to 0, at/above the high percentile to 255, linear in between, and the
// map is monotone non-decreasing. Constant input maps to all zeros.
std::vector<std::uint8_t> stretch_to_8bit(std::span<const std::uint16_t> samples,
                                          double low_pct, double high_pct);

} // namespace canopy::raster
