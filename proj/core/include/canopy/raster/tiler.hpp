#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "canopy/geo/geotransform.hpp"
#include "canopy/geo/mercator.hpp"
#include "canopy/geo/scene.hpp"

namespace canopy::raster {

// One rendered 512x512 tile, band-sequential samples.
struct TileImage {
    geo::TileIndex index;
    int bands = 0;
    std::vector<std::uint16_t> samples;

    std::uint16_t at(int band, int row, int col) const {
        return samples[(static_cast<std::size_t>(band) * geo::kTileSizePx + row) *
                           geo::kTileSizePx +
                       col];
    }
};

struct TileManifestEntry {
    geo::TileIndex index;
    std::string path; // relative to the tile root, "z/x/y.png"
    geo::LonLatBox bounds;
};

struct TilerOptions {
    int zoom = 18;
    int zoom_min = 0;  // accepted zoom window; callers configure 18-19 for
    int zoom_max = 22; // the production pipeline
    std::uint16_t nodata = 0;
    bool emit_raw = false; // additionally write z/x/y.raw (u16 LE, band-sequential)
    bool stretch = false;  // per-tile per-band percentile stretch for the PNG view
    double stretch_low = 2.0;
    double stretch_high = 98.0;
    int jobs = 1;
};

// Mercator geotransform of a tile (pixel-edges origin at the tile's top-left).
geo::GeoTransform tile_geotransform(const geo::TileIndex& tile);

// Nearest-neighbor resample of the scene into one tile; pixels whose centers
// fall outside the scene become nodata. Pure function of (scene, tile).
TileImage render_tile(const geo::SceneRaster& scene, const geo::TileIndex& tile,
                      std::uint16_t nodata);

// Tiles covering the scene footprint envelope at options.zoom. Writes
// {z}/{x}/{y}.png (plus .raw when requested) under out_dir and returns the
// manifest entries sorted by (zoom, x, y). Any jobs count produces the same
// bytes because every tile depends only on its own pixels.
std::vector<TileManifestEntry> tile_scene(const geo::SceneRaster& scene,
                                          const TilerOptions& options,
                                          const std::filesystem::path& out_dir);

void write_tile_manifest(const std::vector<TileManifestEntry>& entries,
                         const std::filesystem::path& path);
std::vector<TileManifestEntry> load_tile_manifest(const std::filesystem::path& path);

// The PNG view of one rendered tile: u8 scenes pass through untouched, u16
// scenes take the top byte, and the optional stretch replaces both. Bands
// 0/1/2 become RGB when present, band 0 alone becomes grayscale.
std::vector<std::uint8_t> tile_png_bytes(const TileImage& tile, geo::SampleType dtype,
                                         const TilerOptions& options);

} // namespace canopy::raster
