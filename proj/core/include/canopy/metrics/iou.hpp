#pragma once

#include <cstdint>

#include "canopy/raster/grid.hpp"

namespace canopy::metrics {

// Axis-aligned box, top-left corner + size, in pixels.
struct Box {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
};

// Area intersection / union. Degenerate boxes (w or h <= 0) are a domain error.
double iou_box(const Box& a, const Box& b);

// Set intersection / union over equal-size binary grids. Two empty masks are
// a domain error, not 0.
double iou_mask(const raster::Grid<std::uint8_t>& a, const raster::Grid<std::uint8_t>& b);

} // namespace canopy::metrics
