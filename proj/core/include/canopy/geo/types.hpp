#pragma once

namespace canopy::geo {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct LonLat {
    double lon = 0.0; // degrees east
    double lat = 0.0; // degrees north
};

// Geographic bounding box in degrees, [west, south, east, north].
struct LonLatBox {
    double west = 0.0;
    double south = 0.0;
    double east = 0.0;
    double north = 0.0;

    bool contains(double lon, double lat) const {
        return lon >= west && lon <= east && lat >= south && lat <= north;
    }
    bool is_degenerate() const { return !(east > west) || !(north > south); }
};

} // namespace canopy::geo
