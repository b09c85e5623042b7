#pragma once

#include <string>

#include "canopy/geo/types.hpp"

namespace canopy::geo {

// Supported CRSs: 4326 (lon/lat degrees), 3857 (spherical web mercator),
// 32601-32660 / 32701-32760 (WGS84 UTM north/south).
bool epsg_supported(int epsg);
std::string epsg_name(int epsg);

// Projected x/y in the CRS's native units (degrees for 4326, meters otherwise).
Vec2 lonlat_to_projected(int epsg, const LonLat& p);
LonLat projected_to_lonlat(int epsg, const Vec2& xy);

// Standard 6-degree zone pick; no Norway/Svalbard exceptions.
int utm_epsg_for(const LonLat& p);

// Central meridian in degrees for a UTM EPSG code.
double utm_central_meridian_deg(int epsg);

} // namespace canopy::geo
