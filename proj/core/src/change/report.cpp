#include "canopy/change/report.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "canopy/util/error.hpp"

namespace canopy::change {

using nlohmann::json;

namespace {

json ring_coordinates(const std::vector<geo::LonLat>& ring) {
    json coords = json::array();
    for (const geo::LonLat& p : ring) coords.push_back({p.lon, p.lat});
    if (!ring.empty()) coords.push_back({ring[0].lon, ring[0].lat});
    return json::array({coords});
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

} // namespace

void write_changes_geojson(const std::vector<ChangeRecord>& records,
                           const detect::InstanceSet& earlier,
                           const detect::InstanceSet& later,
                           const std::filesystem::path& path) {
    json doc;
    doc["type"] = "FeatureCollection";
    doc["epsg"] = earlier.epsg;
    json features = json::array();
    for (const ChangeRecord& rec : records) {
        const detect::TreeInstance& anchor = rec.verdict == ChangeVerdict::lost
                                                 ? earlier.instances[rec.earlier_index]
                                                 : later.instances[rec.later_index];
        json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Polygon"},
                         {"coordinates", ring_coordinates(anchor.polygon)}};
        json props;
        props["verdict"] = verdict_name(rec.verdict);
        props["area_m2"] = anchor.area_m2;
        if (rec.verdict != ChangeVerdict::gained) props["earlier_id"] = rec.earlier_id;
        if (rec.verdict != ChangeVerdict::lost) props["later_id"] = rec.later_id;
        if (rec.verdict == ChangeVerdict::persisted) {
            props["distance_m"] = rec.distance_m;
            props["area_delta_m2"] = rec.area_delta_m2;
        }
        f["properties"] = std::move(props);
        features.push_back(std::move(f));
    }
    doc["features"] = std::move(features);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write GeoJSON: " + path.string());
    out << doc.dump(2) << "\n";
}

void write_region_report_csv(const std::vector<RegionReport>& rows,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV: " + path.string());
    out << "region,count_earlier,count_later,persisted,gained,lost,"
           "net_count_delta,area_earlier_m2,area_later_m2,net_area_delta_m2\n";
    for (const RegionReport& r : rows) {
        out << r.region_id << ',' << r.count_earlier << ',' << r.count_later << ','
            << r.persisted << ',' << r.gained << ',' << r.lost << ','
            << r.net_count_delta() << ',' << fmt(r.area_earlier_m2) << ','
            << fmt(r.area_later_m2) << ',' << fmt(r.net_area_delta_m2()) << '\n';
    }
}

void write_change_summary_md(const std::vector<RegionReport>& rows,
                             const std::vector<std::string>& warnings,
                             const ChangeRunMeta& meta,
                             const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write summary: " + path.string());
    out << "# Canopy change report\n\n";
    out << "- earlier epoch: " << meta.earlier_epoch << "\n";
    out << "- later epoch: " << meta.later_epoch << "\n";
    out << "- strategy: " << meta.strategy << " (max centroid distance "
        << fmt(meta.max_dist_m) << " m)\n\n";

    out << "| region | earlier | later | persisted | gained | lost | net trees | net area (m2) |\n";
    out << "|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (const RegionReport& r : rows) {
        out << "| " << r.region_id << " | " << r.count_earlier << " | " << r.count_later
            << " | " << r.persisted << " | " << r.gained << " | " << r.lost << " | "
            << r.net_count_delta() << " | " << fmt(r.net_area_delta_m2()) << " |\n";
    }
    out << "\n";
    if (!warnings.empty()) {
        out << "## Warnings\n\n";
        for (const std::string& w : warnings) out << "- " << w << "\n";
        out << "\n";
    }
}

} // namespace canopy::change
