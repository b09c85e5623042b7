#include "canopy/geo/mercator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "canopy/util/error.hpp"

namespace canopy::geo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kOriginShift = kPi * kEarthRadiusM; // half the mercator world width

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }
} // namespace

TileIndex lonlat_to_tile(double lon, double lat, int zoom) {
    if (zoom < 0 || zoom > 30)
        throw DomainError("zoom must be in [0, 30], got " + std::to_string(zoom));
    if (!(lon >= -180.0 && lon < 180.0))
        throw DomainError("longitude must satisfy -180 <= lon < 180, got " + std::to_string(lon));
    if (!(std::abs(lat) <= kWebMercatorLatLimit))
        throw DomainError("latitude " + std::to_string(lat) +
                          " outside web-mercator bound +/-85.05112878");

    const double n = std::ldexp(1.0, zoom); // 2^zoom
    const double phi = deg2rad(lat);
    const double fx = (lon + 180.0) / 360.0 * n;
    const double fy = (1.0 - std::log(std::tan(phi) + 1.0 / std::cos(phi)) / kPi) / 2.0 * n;

    TileIndex t;
    t.zoom = zoom;
    t.x = static_cast<std::int64_t>(std::floor(fx));
    t.y = static_cast<std::int64_t>(std::floor(fy));
    // only the exact lat = -limit edge can land on 2^z
    const std::int64_t last = static_cast<std::int64_t>(n) - 1;
    t.x = std::clamp<std::int64_t>(t.x, 0, last);
    t.y = std::clamp<std::int64_t>(t.y, 0, last);
    return t;
}

LonLatBox tile_bounds(const TileIndex& tile) {
    const double n = std::ldexp(1.0, tile.zoom);
    auto lon_of = [&](std::int64_t x) { return static_cast<double>(x) / n * 360.0 - 180.0; };
    auto lat_of = [&](std::int64_t y) {
        const double t = kPi * (1.0 - 2.0 * static_cast<double>(y) / n);
        return rad2deg(std::atan(std::sinh(t)));
    };
    LonLatBox b;
    b.west = lon_of(tile.x);
    b.east = lon_of(tile.x + 1);
    b.north = lat_of(tile.y);
    b.south = lat_of(tile.y + 1);
    return b;
}

TileRange tiles_covering(const LonLatBox& box, int zoom) {
    if (box.is_degenerate()) throw DomainError("degenerate geographic box");
    if (zoom < 0 || zoom > 30)
        throw DomainError("zoom must be in [0, 30], got " + std::to_string(zoom));
    if (!(box.west >= -180.0) || !(box.east <= 180.0))
        throw DomainError("geographic box exceeds [-180, 180] longitude");
    if (!(box.north <= kWebMercatorLatLimit))
        throw DomainError("latitude " + std::to_string(box.north) +
                          " outside web-mercator bound +/-85.05112878");
    const double south = std::min(std::max(box.south, -kWebMercatorLatLimit), box.north);

    const double n = std::ldexp(1.0, zoom);
    auto fx = [&](double lon) { return (lon + 180.0) / 360.0 * n; };
    auto fy = [&](double lat) {
        const double phi = deg2rad(lat);
        return (1.0 - std::log(std::tan(phi) + 1.0 / std::cos(phi)) / kPi) / 2.0 * n;
    };
    // Box edges that sit on (or within eps of) a tile boundary snap onto it:
    // min edges are inclusive, max edges exclusive. Footprints computed
    // through a scene's own geotransform land ~1e-11 tile fractions off the
    // boundary they were constructed on, so exact comparisons would grow an
    // aligned scene by a phantom nodata row/column.
    const double eps = 1e-9;
    const std::int64_t last = static_cast<std::int64_t>(n) - 1;
    auto clamped = [&](double v) {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, last);
    };
    TileRange r;
    r.zoom = zoom;
    r.x0 = clamped(std::floor(fx(box.west) + eps));
    r.x1 = std::max(r.x0, clamped(std::floor(fx(box.east) - eps)));
    r.y0 = clamped(std::floor(fy(box.north) + eps));
    r.y1 = std::max(r.y0, clamped(std::floor(fy(south) - eps)));
    return r;
}

Vec2 lonlat_to_mercator(double lon, double lat) {
    Vec2 m;
    m.x = deg2rad(lon) * kEarthRadiusM;
    m.y = std::log(std::tan(kPi / 4.0 + deg2rad(lat) / 2.0)) * kEarthRadiusM;
    return m;
}

LonLat mercator_to_lonlat(double x, double y) {
    LonLat p;
    p.lon = rad2deg(x / kEarthRadiusM);
    p.lat = rad2deg(2.0 * std::atan(std::exp(y / kEarthRadiusM)) - kPi / 2.0);
    return p;
}

double tile_span_m(int zoom) { return 2.0 * kOriginShift / std::ldexp(1.0, zoom); }

Vec2 tile_pixel_to_mercator(const TileIndex& tile, double px, double py) {
    const double span = tile_span_m(tile.zoom);
    const double res = span / kTileSizePx;
    Vec2 m;
    m.x = -kOriginShift + static_cast<double>(tile.x) * span + px * res;
    m.y = kOriginShift - static_cast<double>(tile.y) * span - py * res;
    return m;
}

Vec2 mercator_to_tile_pixel(const TileIndex& tile, double mx, double my) {
    const double span = tile_span_m(tile.zoom);
    const double res = span / kTileSizePx;
    Vec2 p;
    p.x = (mx + kOriginShift - static_cast<double>(tile.x) * span) / res;
    p.y = (kOriginShift - static_cast<double>(tile.y) * span - my) / res;
    return p;
}

} // namespace canopy::geo
