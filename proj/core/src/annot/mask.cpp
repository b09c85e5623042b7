#include "canopy/annot/mask.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::annot {

raster::Grid<std::uint8_t> fill_polygon(const std::vector<geo::Vec2>& points,
                                        int width, int height) {
    if (points.size() < 3) throw DomainError("polygon needs at least 3 vertices");
    if (width < 1 || height < 1) throw DomainError("mask dimensions must be >= 1");

    raster::Grid<std::uint8_t> grid(width, height, 0);
    const std::size_t n = points.size();
    std::vector<double> xs;
    xs.reserve(n);

    for (int row = 0; row < height; ++row) {
        const double yc = row + 0.5;
        xs.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const geo::Vec2& p1 = points[i];
            const geo::Vec2& p2 = points[(i + 1) % n];
            if ((p1.y > yc) != (p2.y > yc))
                xs.push_back(p1.x + (yc - p1.y) * (p2.x - p1.x) / (p2.y - p1.y));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const double a = xs[k];
            const double b = xs[k + 1];
            // fill the half-open span a <= col+0.5 < b; the comparison fixups
            // keep ceil's rounding from drifting off the exact predicate
            long c0 = std::lround(std::ceil(a - 0.5));
            while (c0 + 0.5 < a) ++c0;
            while (c0 - 1 + 0.5 >= a) --c0;
            long c1 = std::lround(std::ceil(b - 0.5)) - 1;
            while (c1 + 0.5 >= b) --c1;
            while (c1 + 1 + 0.5 < b) ++c1;
            c0 = std::max(c0, 0L);
            c1 = std::min<long>(c1, width - 1);
            for (long c = c0; c <= c1; ++c) grid.at(row, static_cast<int>(c)) = 1;
        }
    }
    return grid;
}

std::int64_t mask_area(const raster::Grid<std::uint8_t>& grid) {
    std::int64_t area = 0;
    for (std::uint8_t v : grid.data()) area += v != 0;
    return area;
}

InstanceMask polygon_to_mask(const std::vector<geo::Vec2>& points, int width,
                             int height, const std::string& image_id) {
    InstanceMask mask;
    mask.grid = fill_polygon(points, width, height);
    mask.area = mask_area(mask.grid);
    mask.image_id = image_id;
    if (mask.area == 0)
        throw DomainError("polygon rasterizes to zero area at " +
                          std::to_string(width) + "x" + std::to_string(height));
    return mask;
}

} // namespace canopy::annot
