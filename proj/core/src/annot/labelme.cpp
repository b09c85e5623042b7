#include "canopy/annot/labelme.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "canopy/util/error.hpp"

namespace canopy::annot {

using nlohmann::json;

std::vector<geo::Vec2> dedupe_vertices(const std::vector<geo::Vec2>& points) {
    std::vector<geo::Vec2> out;
    out.reserve(points.size());
    for (const geo::Vec2& p : points) {
        if (!out.empty() && out.back().x == p.x && out.back().y == p.y) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && out.front().x == out.back().x &&
           out.front().y == out.back().y)
        out.pop_back();
    return out;
}

namespace {

int orient(const geo::Vec2& a, const geo::Vec2& b, const geo::Vec2& c) {
    const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
}

bool on_segment(const geo::Vec2& a, const geo::Vec2& b, const geo::Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_touch(const geo::Vec2& p1, const geo::Vec2& p2, const geo::Vec2& q1,
                    const geo::Vec2& q2) {
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

// line/column of a byte offset inside the document, for parse errors
std::pair<int, int> line_col_at(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

bool polygon_is_simple(const std::vector<geo::Vec2>& points) {
    const std::size_t n = points.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_touch(points[i], points[(i + 1) % n], points[j],
                               points[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

AnnotationParseResult parse_annotation_document(const std::string& text,
                                                const std::string& source_name,
                                                const AnnotationParseOptions& options) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col_at(text, e.byte > 0 ? e.byte - 1 : 0);
        std::ostringstream msg;
        msg << source_name << ":" << line << ":" << col << ": " << e.what();
        throw ParseError(msg.str());
    }
    if (!doc.is_object())
        throw ParseError(source_name + ": annotation document must be a JSON object");

    AnnotationParseResult result;
    std::string image_id = source_name;
    if (doc.contains("imagePath") && doc["imagePath"].is_string())
        image_id = doc["imagePath"].get<std::string>();

    if (!doc.contains("shapes")) return result;
    if (!doc["shapes"].is_array())
        throw ParseError(source_name + ": \"shapes\" must be an array");

    int index = -1;
    for (const json& shape : doc["shapes"]) {
        ++index;
        if (!shape.is_object()) {
            result.rejected.push_back({index, "shape is not an object"});
            continue;
        }
        const std::string shape_type =
            shape.value("shape_type", std::string("polygon"));
        if (shape_type != "polygon") {
            ++result.non_polygon_warnings;
            continue;
        }
        const std::string label = shape.value("label", std::string());
        if (!options.label_filter.empty() && label != options.label_filter) {
            ++result.label_filtered;
            continue;
        }
        if (!shape.contains("points") || !shape["points"].is_array()) {
            result.rejected.push_back({index, "polygon without a points array"});
            continue;
        }

        std::vector<geo::Vec2> pts;
        bool bad_point = false;
        for (const json& p : shape["points"]) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
                !p[1].is_number()) {
                bad_point = true;
                break;
            }
            pts.push_back({p[0].get<double>(), p[1].get<double>()});
        }
        if (bad_point) {
            result.rejected.push_back({index, "point is not a [x, y] number pair"});
            continue;
        }
        if (pts.size() < 3) {
            result.rejected.push_back(
                {index, "polygon has " + std::to_string(pts.size()) +
                            " points, need at least 3"});
            continue;
        }
        bool out_of_bounds = false;
        for (const geo::Vec2& p : pts)
            if (p.x < 0.0 || p.x > options.max_coord || p.y < 0.0 ||
                p.y > options.max_coord)
                out_of_bounds = true;
        if (out_of_bounds) {
            result.rejected.push_back(
                {index, "vertex outside [0, " + std::to_string(options.max_coord) + "]"});
            continue;
        }

        std::vector<geo::Vec2> clean = dedupe_vertices(pts);
        if (clean.size() < 3) {
            result.rejected.push_back({index, "fewer than 3 distinct vertices"});
            continue;
        }
        if (!polygon_is_simple(clean)) {
            result.rejected.push_back({index, "polygon self-intersects after cleanup"});
            continue;
        }
        result.annotations.push_back({label, std::move(clean), image_id});
    }
    return result;
}

AnnotationParseResult parse_annotation_file(const std::filesystem::path& path,
                                            const AnnotationParseOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open annotation file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_annotation_document(buf.str(), path.filename().string(), options);
}

std::vector<std::filesystem::path> list_annotation_files(
    const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("annotation directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace canopy::annot
