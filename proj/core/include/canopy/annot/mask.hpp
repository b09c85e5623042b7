#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canopy/geo/types.hpp"
#include "canopy/raster/grid.hpp"

namespace canopy::annot {

struct InstanceMask {
    raster::Grid<std::uint8_t> grid; // 0 / 1
    std::int64_t area = 0;           // number of set pixels
    std::string image_id;
};

// Scanline even-odd fill. A pixel is set iff its center (col+0.5, row+0.5)
// lies inside the polygon; centers exactly on a boundary follow the
// half-open crossing rule (left/top edges included), so shared edges between
// adjacent polygons never double-fill.
raster::Grid<std::uint8_t> fill_polygon(const std::vector<geo::Vec2>& points,
                                        int width, int height);

// fill_polygon + area bookkeeping; zero covered pixels is a domain error.
InstanceMask polygon_to_mask(const std::vector<geo::Vec2>& points, int width,
                             int height, const std::string& image_id = {});

std::int64_t mask_area(const raster::Grid<std::uint8_t>& grid);

} // namespace canopy::annot
