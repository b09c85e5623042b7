#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "canopy/geo/mercator.hpp"
#include "canopy/geo/polygon.hpp"
#include "canopy/geo/types.hpp"
#include "canopy/synth/spec.hpp"

namespace canopy::synth {

inline constexpr int kCrownVertexCount = 24;
inline constexpr double kTruthAreaCellM = 0.1;

struct TruthTree {
    std::string id; // "t0001", creation order
    double radius_m = 0.0;
    std::string fate; // persisted | removed | added
    bool has_earlier = false;
    bool has_later = false;
    geo::Vec2 earlier{}; // projected center, valid iff has_earlier
    geo::Vec2 later{};
    double displacement_m = 0.0; // |later - earlier| for persisted trees
    double area_m2 = 0.0;        // crown outline area on the truth grid
    std::string region;          // empty when outside every region
};

struct TruthLedger {
    std::uint64_t seed = 0;
    int epsg = 0;
    int zoom = 18;
    double gsd_m = 0.5;
    std::string earlier_epoch, later_epoch;
    double min_spacing_m = 0.0;
    double jitter_m = 0.0;
    double crown_radius_min_m = 0.0, crown_radius_max_m = 0.0;
    geo::Bounds scene_bounds; // projected meters
    std::vector<TruthTree> trees;

    bool tree_in_epoch(const TruthTree& t, const std::string& epoch) const {
        return epoch == earlier_epoch ? t.has_earlier : t.has_later;
    }
    geo::Vec2 tree_center(const TruthTree& t, const std::string& epoch) const {
        return epoch == earlier_epoch ? t.earlier : t.later;
    }
};

TruthLedger load_truth_ledger(const std::filesystem::path& path);
void save_truth_ledger(const TruthLedger& ledger, const std::filesystem::path& path);

// Crown outline: regular 24-gon in projected meters.
std::vector<geo::Vec2> crown_polygon(const geo::Vec2& center, double radius);

geo::TileIndex crown_tile(int epsg, const geo::Vec2& center, int zoom);

// Crown outline in the pixel frame of `tile`, clipped to the tile box.
// Layout keeps every vertex inside the tile, so the clip is normally a no-op.
std::vector<geo::Vec2> crown_tile_polygon(int epsg, const geo::Vec2& center, double radius,
                                          const geo::TileIndex& tile);

struct FixturePaths {
    std::filesystem::path earlier_scene, later_scene; // .raw payloads
    std::filesystem::path earlier_annotations, later_annotations; // directories
    std::filesystem::path earlier_detections, later_detections;
    std::filesystem::path ledger;
    std::filesystem::path regions;
};

// Writes everything the pipeline consumes: two scene rasters (+sidecars),
// per-tile annotation documents, simulated detections, regions.geojson and
// the truth ledger. Identical spec -> byte-identical files.
FixturePaths generate_fixture(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Detections for one epoch of the ledger, written as a results JSON array.
void simulate_detector(const TruthLedger& ledger, const DetectorNoise& noise,
                       const std::string& epoch, std::uint64_t seed,
                       const std::filesystem::path& out_file);

} // namespace canopy::synth
