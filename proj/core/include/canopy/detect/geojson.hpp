#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "canopy/detect/instance.hpp"

namespace canopy::detect {

struct RegionDef {
    std::string id;
    std::vector<geo::LonLat> polygon; // open ring, lon/lat degrees
};

// FeatureCollection of Polygon features with properties
// {id, score, area_m2, epoch}; the collection carries top-level "epsg" and
// "epoch" members recording the projected CRS behind the metric fields.
void write_instances_geojson(const InstanceSet& set,
                             const std::filesystem::path& path);
InstanceSet read_instances_geojson(const std::filesystem::path& path);

// FeatureCollection of Polygon features; region ids come from a string
// property "id" (or "name"), falling back to "region_<n>" by position.
std::vector<RegionDef> read_regions_geojson(const std::filesystem::path& path);
void write_regions_geojson(const std::vector<RegionDef>& regions,
                           const std::filesystem::path& path);

} // namespace canopy::detect
