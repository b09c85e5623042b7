#pragma once

#include <array>

#include "canopy/geo/types.hpp"

namespace canopy::geo {

// Affine pixel<->projected mapping, six coefficients in the usual raster order:
//   X = c[0] + col*c[1] + row*c[2]
//   Y = c[3] + col*c[4] + row*c[5]
// (c[0], c[3]) is the projected position of the *outer corner* of pixel (0,0),
// so pixel centers sit at half-integer pixel coordinates.
class GeoTransform {
public:
    GeoTransform() : c_{0.0, 1.0, 0.0, 0.0, 0.0, -1.0} {}
    explicit GeoTransform(const std::array<double, 6>& coeffs);

    const std::array<double, 6>& coeffs() const { return c_; }

    // col/row are fractional pixel coordinates (edges convention).
    Vec2 pixel_to_geo(double col, double row) const;
    Vec2 geo_to_pixel(double x, double y) const;

    // Signed X step per column / Y step per row for axis-aligned transforms.
    double pixel_width() const { return c_[1]; }
    double pixel_height() const { return c_[5]; }

    bool axis_aligned() const { return c_[2] == 0.0 && c_[4] == 0.0; }

private:
    std::array<double, 6> c_;
    double inv_det_;
};

} // namespace canopy::geo
