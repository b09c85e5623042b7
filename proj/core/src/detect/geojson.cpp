#include "canopy/detect/geojson.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "canopy/geo/polygon.hpp"
#include "canopy/geo/projection.hpp"
#include "canopy/util/error.hpp"

namespace canopy::detect {

using nlohmann::json;

namespace {

json ring_coordinates(const std::vector<geo::LonLat>& ring) {
    json coords = json::array();
    for (const geo::LonLat& p : ring) coords.push_back({p.lon, p.lat});
    if (!ring.empty()) coords.push_back({ring[0].lon, ring[0].lat}); // close
    return json::array({coords});
}

std::vector<geo::LonLat> ring_from_coordinates(const json& geometry,
                                               const std::string& where) {
    if (!geometry.is_object() || geometry.value("type", std::string()) != "Polygon")
        throw ParseError(where + ": geometry must be a Polygon");
    const json& rings = geometry.at("coordinates");
    if (!rings.is_array() || rings.empty())
        throw ParseError(where + ": polygon without coordinates");
    std::vector<geo::LonLat> out;
    for (const json& pt : rings[0]) {
        if (!pt.is_array() || pt.size() < 2)
            throw ParseError(where + ": coordinate is not a [lon, lat] pair");
        out.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    // drop the closing vertex
    while (out.size() > 1 && out.front().lon == out.back().lon &&
           out.front().lat == out.back().lat)
        out.pop_back();
    if (out.size() < 3) throw ParseError(where + ": polygon ring has < 3 vertices");
    return out;
}

json load_feature_collection(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open GeoJSON: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object() ||
        doc.value("type", std::string()) != "FeatureCollection" ||
        !doc.contains("features") || !doc["features"].is_array())
        throw ParseError(path.string() + ": expected a GeoJSON FeatureCollection");
    return doc;
}

} // namespace

void write_instances_geojson(const InstanceSet& set,
                             const std::filesystem::path& path) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["epsg"] = set.epsg;
    doc["epoch"] = set.epoch;
    json features = json::array();
    for (const TreeInstance& inst : set.instances) {
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Polygon"},
                         {"coordinates", ring_coordinates(inst.polygon)}};
        f["properties"] = {{"id", inst.id},
                           {"score", inst.score},
                           {"area_m2", inst.area_m2},
                           {"epoch", inst.epoch}};
        features.push_back(std::move(f));
    }
    doc["features"] = std::move(features);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write GeoJSON: " + path.string());
    out << doc.dump(2) << "\n";
}

InstanceSet read_instances_geojson(const std::filesystem::path& path) {
    const json doc = load_feature_collection(path);
    InstanceSet set;
    if (!doc.contains("epsg") || !doc["epsg"].is_number_integer())
        throw ParseError(path.string() + ": missing integer \"epsg\" member");
    set.epsg = doc["epsg"].get<int>();
    if (!geo::epsg_supported(set.epsg))
        throw ConfigError(path.string() + ": unsupported epsg " +
                          std::to_string(set.epsg));
    set.epoch = doc.value("epoch", std::string());

    int index = -1;
    for (const json& f : doc["features"]) {
        ++index;
        const std::string where = path.string() + " feature " + std::to_string(index);
        if (!f.is_object() || !f.contains("geometry"))
            throw ParseError(where + ": not a Feature with geometry");
        TreeInstance inst;
        inst.polygon = ring_from_coordinates(f["geometry"], where);
        const json props = f.value("properties", json::object());
        inst.id = props.value("id", std::string());
        inst.score = props.value("score", 0.0);
        inst.area_m2 = props.value("area_m2", 0.0);
        inst.epoch = props.value("epoch", set.epoch);
        if (set.epoch.empty()) set.epoch = inst.epoch;

        std::vector<geo::Vec2> proj = projected_polygon(inst, set.epsg);
        inst.centroid_projected = geo::polygon_centroid(proj);
        inst.centroid = geo::projected_to_lonlat(set.epsg, inst.centroid_projected);
        if (inst.area_m2 <= 0.0)
            inst.area_m2 = std::abs(geo::polygon_signed_area(proj));
        set.instances.push_back(std::move(inst));
    }
    return set;
}

std::vector<RegionDef> read_regions_geojson(const std::filesystem::path& path) {
    const json doc = load_feature_collection(path);
    std::vector<RegionDef> regions;
    int index = -1;
    for (const json& f : doc["features"]) {
        ++index;
        const std::string where = path.string() + " feature " + std::to_string(index);
        if (!f.is_object() || !f.contains("geometry"))
            throw ParseError(where + ": not a Feature with geometry");
        RegionDef r;
        r.polygon = ring_from_coordinates(f["geometry"], where);
        const json props = f.value("properties", json::object());
        if (props.contains("id") && props["id"].is_string())
            r.id = props["id"].get<std::string>();
        else if (props.contains("name") && props["name"].is_string())
            r.id = props["name"].get<std::string>();
        else
            r.id = "region_" + std::to_string(index + 1);
        regions.push_back(std::move(r));
    }
    return regions;
}

void write_regions_geojson(const std::vector<RegionDef>& regions,
                           const std::filesystem::path& path) {
    json doc;
    doc["type"] = "FeatureCollection";
    json features = json::array();
    for (const RegionDef& r : regions) {
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Polygon"},
                         {"coordinates", ring_coordinates(r.polygon)}};
        f["properties"] = {{"id", r.id}};
        features.push_back(std::move(f));
    }
    doc["features"] = std::move(features);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write GeoJSON: " + path.string());
    out << doc.dump(2) << "\n";
}

} // namespace canopy::detect
