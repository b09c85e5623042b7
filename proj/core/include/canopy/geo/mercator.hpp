#pragma once

#include <cstdint>

#include "canopy/geo/types.hpp"

namespace canopy::geo {

// XYZ (slippy-map) tile addressing on spherical web mercator, origin at the
// top-left. Tiles are 512 px throughout this project.

inline constexpr double kWebMercatorLatLimit = 85.05112878;
inline constexpr double kEarthRadiusM = 6378137.0;
inline constexpr int kTileSizePx = 512;

struct TileIndex {
    int zoom = 0;
    std::int64_t x = 0;
    std::int64_t y = 0;

    bool operator==(const TileIndex&) const = default;
    // manifest order
    bool operator<(const TileIndex& o) const {
        if (zoom != o.zoom) return zoom < o.zoom;
        if (x != o.x) return x < o.x;
        return y < o.y;
    }
};

// Inclusive tile ranges covering a geographic box at one zoom.
struct TileRange {
    int zoom = 0;
    std::int64_t x0 = 0, x1 = -1;
    std::int64_t y0 = 0, y1 = -1;

    std::int64_t count() const {
        if (x1 < x0 || y1 < y0) return 0;
        return (x1 - x0 + 1) * (y1 - y0 + 1);
    }
};

// x = floor((lon+180)/360 * 2^z), y = floor((1 - ln(tan phi + sec phi)/pi)/2 * 2^z).
// Latitudes beyond the mercator limit are a domain error (never clamped);
// the exact southern/eastern limits fold into the last row/column.
TileIndex lonlat_to_tile(double lon, double lat, int zoom);

// Geographic bounds of a tile; adjacent tiles share edges exactly because
// the same expression is evaluated on the same integers.
LonLatBox tile_bounds(const TileIndex& tile);

TileRange tiles_covering(const LonLatBox& box, int zoom);

// Spherical mercator (EPSG:3857) meters.
Vec2 lonlat_to_mercator(double lon, double lat);
LonLat mercator_to_lonlat(double x, double y);

// Side length of one tile in mercator meters.
double tile_span_m(int zoom);

// Mercator coordinates of a fractional pixel within a tile
// (px, py in [0, 512], measured from the tile's top-left corner).
Vec2 tile_pixel_to_mercator(const TileIndex& tile, double px, double py);
Vec2 mercator_to_tile_pixel(const TileIndex& tile, double mx, double my);

} // namespace canopy::geo
