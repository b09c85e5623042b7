#include "commands.hpp"

#include <cstdio>
#include <set>

#include "canopy/detect/detection.hpp"
#include "canopy/detect/geojson.hpp"
#include "canopy/detect/instance.hpp"
#include "canopy/geo/mercator.hpp"
#include "canopy/geo/projection.hpp"
#include "canopy/raster/tiler.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

// UTM zone of the tiled footprint's mean center; used when --epsg is absent.
int derive_epsg(const std::vector<raster::TileManifestEntry>& entries) {
    double lon = 0.0, lat = 0.0;
    for (const auto& e : entries) {
        lon += 0.5 * (e.bounds.west + e.bounds.east);
        lat += 0.5 * (e.bounds.south + e.bounds.north);
    }
    lon /= static_cast<double>(entries.size());
    lat /= static_cast<double>(entries.size());
    return geo::utm_epsg_for(geo::LonLat{lon, lat});
}

} // namespace

IngestStageResult stage_ingest(const fs::path& detections_file, const fs::path& manifest_file,
                               const std::string& epoch, int epsg, double dedupe_iou,
                               const fs::path& out_file) {
    detect::DetectionParseResult parsed = detect::parse_detections(detections_file);
    for (const auto& rej : parsed.rejected)
        std::fprintf(stderr, "warning: %s: record %d rejected: %s\n",
                     detections_file.filename().string().c_str(), rej.index,
                     rej.reason.c_str());

    auto manifest = raster::load_tile_manifest(manifest_file);
    if (manifest.empty()) throw DomainError("tile manifest is empty: " + manifest_file.string());
    std::set<geo::TileIndex> tiled;
    for (const auto& e : manifest) tiled.insert(e.index);
    for (const auto& d : parsed.detections) {
        if (!tiled.count(d.tile))
            throw DomainError("detection references tile " + d.tile_str +
                              " which is not in the manifest");
    }

    if (epsg == 0) epsg = derive_epsg(manifest);

    detect::InstanceSet raw;
    raw.epsg = epsg;
    raw.epoch = epoch;
    raw.instances.reserve(parsed.detections.size());
    for (const auto& d : parsed.detections)
        raw.instances.push_back(detect::georeference(d, epsg, epoch));

    detect::InstanceSet assembled = detect::assemble_scene(raw, dedupe_iou);
    detect::assign_instance_ids(assembled);
    detect::write_instances_geojson(assembled, out_file);

    return {raw.instances.size(), assembled.instances.size(), parsed.rejected.size(), epsg};
}

int run_ingest(const IngestArgs& a) {
    require_flag(a.detections, "--detections");
    require_flag(a.manifest, "--manifest");
    require_flag(a.epoch, "--epoch");
    require_flag(a.out, "--out");
    if (!(a.dedupe_iou > 0.0) || a.dedupe_iou > 1.0)
        throw ConfigError("--dedupe-iou must be in (0, 1]");

    RunContext run("ingest", a.out, /*dir_mode=*/false);
    run.param("epoch", a.epoch);
    run.param("dedupe_iou", a.dedupe_iou);
    run.input_file("detections", a.detections);
    run.input_file("manifest", a.manifest);

    IngestStageResult res = stage_ingest(a.detections, a.manifest, a.epoch, a.epsg,
                                         a.dedupe_iou, run.stage() / fs::path(a.out).filename());
    run.param("epsg", res.epsg);
    run.note("detections", res.raw_detections);
    run.note("instances", res.scene_instances);
    run.note("rejected", res.rejected);
    run.finalize();

    // Both counts matter: per-tile detections double-count crowns that span
    // tile seams, the deduplicated figure is the scene-level tree count.
    std::printf("per-tile detections: %zu (rejected %zu)\n", res.raw_detections, res.rejected);
    std::printf("scene instances after dedupe: %zu (EPSG:%d)\n", res.scene_instances, res.epsg);
    return 0;
}

} // namespace canopy::cli
