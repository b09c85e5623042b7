#pragma once

#include <string>
#include <vector>

#include "canopy/detect/detection.hpp"
#include "canopy/geo/types.hpp"

namespace canopy::detect {

// One georeferenced tree.
struct TreeInstance {
    std::string id;                     // "<epoch>-<seq>", assigned on assembly
    std::vector<geo::LonLat> polygon;   // open ring, lon/lat degrees
    geo::LonLat centroid;
    geo::Vec2 centroid_projected;       // meters in the set's CRS
    double area_m2 = 0.0;
    double score = 0.0;
    std::string epoch;
};

struct InstanceSet {
    int epsg = 0; // projected CRS behind centroid_projected / area_m2
    std::string epoch;
    std::vector<TreeInstance> instances;
};

// Pixel -> mercator -> lon/lat -> projected; area and centroid by the planar
// shoelace formula in projected meters. Collinear polygons (zero area) are a
// domain error.
TreeInstance georeference(const Detection& d, int epsg, const std::string& epoch);

// Merges instances whose polygons overlap with rasterized IoU (0.1 m cells)
// >= dedupe_iou; the survivor keeps the higher score and takes the union
// outline. Passes repeat until no merge fires, so the result is idempotent.
InstanceSet assemble_scene(const InstanceSet& input, double dedupe_iou = 0.5);

// Recomputes ids as "<epoch>-<seq>" in (min-lon, min-lat, -score) order.
void assign_instance_ids(InstanceSet& set);

// Projected copy of an instance's outline.
std::vector<geo::Vec2> projected_polygon(const TreeInstance& inst, int epsg);

} // namespace canopy::detect
