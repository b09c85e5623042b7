#pragma once

#include <span>
#include <vector>

#include "canopy/geo/types.hpp"

namespace canopy::geo {

struct Bounds {
    double minx = 0.0, miny = 0.0, maxx = 0.0, maxy = 0.0;
    double width() const { return maxx - minx; }
    double height() const { return maxy - miny; }
};

// Shoelace; positive for counter-clockwise rings in a y-up frame.
double polygon_signed_area(std::span<const Vec2> poly);

// Area-weighted centroid; falls back to the vertex mean for zero-area rings.
Vec2 polygon_centroid(std::span<const Vec2> poly);

Bounds polygon_bounds(std::span<const Vec2> poly);

// Even-odd rule with the same half-open crossing predicate as the mask
// rasterizer (points exactly on a right/bottom edge are outside).
bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly);

// Sutherland-Hodgman clip against an axis-aligned box; may return < 3
// vertices when the polygon lies outside.
std::vector<Vec2> clip_polygon_box(std::span<const Vec2> poly, double minx,
                                   double miny, double maxx, double maxy);

// IoU of two polygons by even-odd rasterization on a `cell`-sized grid over
// their joint bounds (cell centers sampled).
double rasterized_pair_iou(std::span<const Vec2> a, std::span<const Vec2> b,
                           double cell);

// Area by the same cell-center sampling (cells fully outside count zero).
double rasterized_area(std::span<const Vec2> poly, double cell);

} // namespace canopy::geo
