#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "canopy/geo/mercator.hpp"
#include "canopy/geo/types.hpp"
#include "canopy/metrics/iou.hpp"

namespace canopy::detect {

// One externally produced instance, in tile pixel coordinates.
struct Detection {
    geo::TileIndex tile;
    std::string tile_str; // original "z/x/y"
    std::string label;
    double score = 0.0;
    metrics::Box bbox;
    std::vector<geo::Vec2> polygon;
};

struct RejectedDetection {
    int index = 0;
    std::string reason;
};

struct DetectionParseResult {
    std::vector<Detection> detections;
    std::vector<RejectedDetection> rejected;
};

geo::TileIndex parse_tile_id(const std::string& s); // "z/x/y"

// Document shape: JSON array of {tile, label, score, bbox:[x,y,w,h],
// polygon:[[x,y],...]}. Malformed JSON throws; per-record violations
// (score out of [0,1], box/polygon inconsistencies, ...) are reported in
// `rejected` with the record index.
DetectionParseResult parse_detections_text(const std::string& text,
                                           const std::string& source_name);
DetectionParseResult parse_detections(const std::filesystem::path& path);

} // namespace canopy::detect
