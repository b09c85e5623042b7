#include "canopy/detect/detection.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "canopy/geo/polygon.hpp"
#include "canopy/util/error.hpp"

namespace canopy::detect {

using nlohmann::json;

geo::TileIndex parse_tile_id(const std::string& s) {
    int zoom = 0;
    std::int64_t x = 0, y = 0;
    char trailing = 0;
    const int got =
        std::sscanf(s.c_str(), "%d/%" SCNd64 "/%" SCNd64 "%c", &zoom, &x, &y, &trailing);
    if (got != 3) throw ParseError("tile id must be \"z/x/y\", got \"" + s + "\"");
    if (zoom < 0 || zoom > 30) throw DomainError("tile zoom out of range in \"" + s + "\"");
    const std::int64_t n = std::int64_t{1} << zoom;
    if (x < 0 || x >= n || y < 0 || y >= n)
        throw DomainError("tile x/y out of range for zoom in \"" + s + "\"");
    return {zoom, x, y};
}

namespace {

// box must contain the polygon's bounding box within 0.5 px
bool box_covers_polygon(const metrics::Box& b, std::span<const geo::Vec2> poly) {
    const geo::Bounds pb = geo::polygon_bounds(poly);
    const double tol = 0.5;
    return pb.minx >= b.x - tol && pb.miny >= b.y - tol &&
           pb.maxx <= b.x + b.w + tol && pb.maxy <= b.y + b.h + tol;
}

} // namespace

DetectionParseResult parse_detections_text(const std::string& text,
                                           const std::string& source_name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source_name + ": " + e.what());
    }
    if (!doc.is_array())
        throw ParseError(source_name + ": detections document must be a JSON array");

    DetectionParseResult result;
    int index = -1;
    for (const json& rec : doc) {
        ++index;
        auto reject = [&](const std::string& reason) {
            result.rejected.push_back({index, reason});
        };
        if (!rec.is_object()) {
            reject("record is not an object");
            continue;
        }
        bool missing = false;
        for (const char* key : {"tile", "label", "score", "bbox", "polygon"})
            if (!rec.contains(key)) {
                reject(std::string("missing field \"") + key + "\"");
                missing = true;
                break;
            }
        if (missing) continue;

        Detection d;
        try {
            d.tile_str = rec.at("tile").get<std::string>();
            d.tile = parse_tile_id(d.tile_str);
            d.label = rec.at("label").get<std::string>();
            d.score = rec.at("score").get<double>();
            const auto box = rec.at("bbox").get<std::vector<double>>();
            if (box.size() != 4) {
                reject("bbox must have 4 numbers");
                continue;
            }
            d.bbox = {box[0], box[1], box[2], box[3]};
            for (const json& p : rec.at("polygon")) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
                    !p[1].is_number())
                    throw ParseError("polygon point is not a [x, y] pair");
                d.polygon.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        } catch (const json::exception& e) {
            reject(e.what());
            continue;
        } catch (const Error& e) {
            reject(e.what());
            continue;
        }

        if (!(d.score >= 0.0 && d.score <= 1.0)) {
            reject("score out of range [0, 1]");
            continue;
        }
        if (!(d.bbox.w > 0.0 && d.bbox.h > 0.0)) {
            reject("bbox w/h must be > 0");
            continue;
        }
        if (d.polygon.size() < 3) {
            reject("polygon has fewer than 3 points");
            continue;
        }
        if (!box_covers_polygon(d.bbox, d.polygon)) {
            reject("bbox does not contain the polygon within 0.5 px");
            continue;
        }
        result.detections.push_back(std::move(d));
    }
    return result;
}

DetectionParseResult parse_detections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open detections file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_detections_text(buf.str(), path.filename().string());
}

} // namespace canopy::detect
