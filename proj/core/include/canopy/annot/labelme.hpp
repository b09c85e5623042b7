#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "canopy/geo/types.hpp"

namespace canopy::annot {

struct PolygonAnnotation {
    std::string label;
    std::vector<geo::Vec2> points; // tile pixel coordinates
    std::string image_id;
};

struct RejectedRecord {
    int shape_index = 0;
    std::string reason;
};

struct AnnotationParseOptions {
    std::string label_filter = "tree"; // empty = accept all labels
    double max_coord = 512.0;          // vertices must lie in [0, max_coord]^2
};

struct AnnotationParseResult {
    std::vector<PolygonAnnotation> annotations;
    int non_polygon_warnings = 0;      // shapes skipped for shape_type
    int label_filtered = 0;            // polygon shapes with other labels
    std::vector<RejectedRecord> rejected;
};

// Consecutive-duplicate removal (incl. a closing vertex repeating the first).
std::vector<geo::Vec2> dedupe_vertices(const std::vector<geo::Vec2>& points);

// True when no two non-adjacent edges intersect or touch.
bool polygon_is_simple(const std::vector<geo::Vec2>& points);

// Parses one annotation-tool JSON document ({imagePath, shapes:[{label,
// points, shape_type}]}). Malformed JSON raises a parse error carrying line
// and column; bad individual shapes land in `rejected` instead of throwing.
AnnotationParseResult parse_annotation_document(const std::string& text,
                                                const std::string& source_name,
                                                const AnnotationParseOptions& options);
AnnotationParseResult parse_annotation_file(const std::filesystem::path& path,
                                            const AnnotationParseOptions& options);

// All *.json files directly inside a directory, sorted by filename.
std::vector<std::filesystem::path> list_annotation_files(
    const std::filesystem::path& dir);

} // namespace canopy::annot
