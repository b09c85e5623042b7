#include "canopy/geo/geotransform.hpp"

#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::geo {

GeoTransform::GeoTransform(const std::array<double, 6>& coeffs) : c_(coeffs) {
    const double det = c_[1] * c_[5] - c_[2] * c_[4];
    if (det == 0.0 || !std::isfinite(det))
        throw DomainError("geotransform is not invertible (zero determinant)");
    inv_det_ = 1.0 / det;
}

Vec2 GeoTransform::pixel_to_geo(double col, double row) const {
    return {c_[0] + col * c_[1] + row * c_[2], c_[3] + col * c_[4] + row * c_[5]};
}

Vec2 GeoTransform::geo_to_pixel(double x, double y) const {
    const double dx = x - c_[0];
    const double dy = y - c_[3];
    return {(dx * c_[5] - dy * c_[2]) * inv_det_, (dy * c_[1] - dx * c_[4]) * inv_det_};
}

} // namespace canopy::geo
