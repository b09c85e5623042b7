#include "canopy/metrics/iou.hpp"

#include <algorithm>

#include "canopy/util/error.hpp"

namespace canopy::metrics {

double iou_box(const Box& a, const Box& b) {
    if (!(a.w > 0.0) || !(a.h > 0.0) || !(b.w > 0.0) || !(b.h > 0.0))
        throw DomainError("iou_box requires positive box dimensions");
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return inter / uni;
}

double iou_mask(const raster::Grid<std::uint8_t>& a,
                const raster::Grid<std::uint8_t>& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DomainError("iou_mask dimension mismatch");
    std::int64_t inter = 0, uni = 0;
    const auto& da = a.data();
    const auto& db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const bool pa = da[i] != 0;
        const bool pb = db[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) throw DomainError("iou_mask of two empty masks is undefined");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace canopy::metrics
