#include "canopy/raster/tiler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "canopy/geo/projection.hpp"
#include "canopy/raster/png.hpp"
#include "canopy/raster/stretch.hpp"
#include "canopy/util/error.hpp"

namespace canopy::raster {

using geo::kTileSizePx;
using nlohmann::json;

geo::GeoTransform tile_geotransform(const geo::TileIndex& tile) {
    const double res = geo::tile_span_m(tile.zoom) / kTileSizePx;
    const geo::Vec2 nw = geo::tile_pixel_to_mercator(tile, 0.0, 0.0);
    return geo::GeoTransform({nw.x, res, 0.0, nw.y, 0.0, -res});
}

TileImage render_tile(const geo::SceneRaster& scene, const geo::TileIndex& tile,
                      std::uint16_t nodata) {
    const geo::SceneDescriptor& d = scene.desc;
    TileImage out;
    out.index = tile;
    out.bands = d.bands;
    out.samples.assign(
        static_cast<std::size_t>(d.bands) * kTileSizePx * kTileSizePx, nodata);

    const bool scene_is_mercator = d.epsg == 3857;
    for (int r = 0; r < kTileSizePx; ++r) {
        for (int c = 0; c < kTileSizePx; ++c) {
            const geo::Vec2 m = geo::tile_pixel_to_mercator(tile, c + 0.5, r + 0.5);
            geo::Vec2 proj;
            if (scene_is_mercator) {
                proj = m; // skip the lon/lat round trip so aligned scenes stay exact
            } else {
                const geo::LonLat ll = geo::mercator_to_lonlat(m.x, m.y);
                proj = geo::lonlat_to_projected(d.epsg, ll);
            }
            const geo::Vec2 px = d.transform.geo_to_pixel(proj.x, proj.y);
            const int col = static_cast<int>(std::floor(px.x));
            const int row = static_cast<int>(std::floor(px.y));
            if (col < 0 || col >= d.width || row < 0 || row >= d.height) continue;
            for (int b = 0; b < d.bands; ++b) {
                out.samples[(static_cast<std::size_t>(b) * kTileSizePx + r) *
                                kTileSizePx +
                            c] = scene.at(b, row, col);
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> tile_png_bytes(const TileImage& tile, geo::SampleType dtype,
                                         const TilerOptions& options) {
    const std::size_t plane = static_cast<std::size_t>(kTileSizePx) * kTileSizePx;
    const int channels = tile.bands >= 3 ? 3 : 1;

    std::vector<std::uint8_t> view(plane * channels);
    std::vector<std::uint8_t> band8;
    for (int ch = 0; ch < channels; ++ch) {
        const std::uint16_t* src = tile.samples.data() + static_cast<std::size_t>(ch) * plane;
        if (options.stretch) {
            band8 = stretch_to_8bit(std::span<const std::uint16_t>(src, plane),
                                    options.stretch_low, options.stretch_high);
        } else {
            band8.resize(plane);
            if (dtype == geo::SampleType::u8)
                for (std::size_t i = 0; i < plane; ++i)
                    band8[i] = static_cast<std::uint8_t>(src[i]);
            else
                for (std::size_t i = 0; i < plane; ++i)
                    band8[i] = static_cast<std::uint8_t>(src[i] >> 8);
        }
        for (std::size_t i = 0; i < plane; ++i) view[i * channels + ch] = band8[i];
    }
    return encode_png8(kTileSizePx, kTileSizePx, channels, view.data());
}

namespace {

std::vector<std::uint8_t> tile_raw_bytes(const TileImage& tile) {
    std::vector<std::uint8_t> raw(tile.samples.size() * 2);
    for (std::size_t i = 0; i < tile.samples.size(); ++i) {
        raw[2 * i] = static_cast<std::uint8_t>(tile.samples[i] & 0xff);
        raw[2 * i + 1] = static_cast<std::uint8_t>(tile.samples[i] >> 8);
    }
    return raw;
}

} // namespace

std::vector<TileManifestEntry> tile_scene(const geo::SceneRaster& scene,
                                          const TilerOptions& options,
                                          const std::filesystem::path& out_dir) {
    scene.desc.validate();
    if (options.zoom < options.zoom_min || options.zoom > options.zoom_max)
        throw ConfigError("zoom " + std::to_string(options.zoom) +
                          " outside the configured range [" +
                          std::to_string(options.zoom_min) + ", " +
                          std::to_string(options.zoom_max) + "]");

    const geo::LonLatBox footprint = scene.desc.footprint_lonlat();
    const geo::TileRange range = geo::tiles_covering(footprint, options.zoom);
    if (range.count() == 0)
        throw DomainError("zoom " + std::to_string(options.zoom) +
                          " produces zero tiles for this scene");

    std::vector<TileManifestEntry> entries;
    entries.reserve(static_cast<std::size_t>(range.count()));
    for (std::int64_t x = range.x0; x <= range.x1; ++x) {
        for (std::int64_t y = range.y0; y <= range.y1; ++y) {
            TileManifestEntry e;
            e.index = {options.zoom, x, y};
            e.path = std::to_string(options.zoom) + "/" + std::to_string(x) + "/" +
                     std::to_string(y) + ".png";
            e.bounds = geo::tile_bounds(e.index);
            entries.push_back(e);
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const TileManifestEntry& a, const TileManifestEntry& b) {
                  return a.index < b.index;
              });

    for (std::int64_t x = range.x0; x <= range.x1; ++x)
        std::filesystem::create_directories(out_dir / std::to_string(options.zoom) /
                                            std::to_string(x));

    const int jobs = std::max(1, options.jobs);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) return;
            try {
                const TileImage img =
                    render_tile(scene, entries[i].index, options.nodata);
                write_binary_file(out_dir / entries[i].path,
                                  tile_png_bytes(img, scene.desc.dtype, options));
                if (options.emit_raw) {
                    std::filesystem::path raw_path = out_dir / entries[i].path;
                    raw_path.replace_extension(".raw");
                    write_binary_file(raw_path, tile_raw_bytes(img));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(entries.size()); // stop the other workers
                return;
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return entries;
}

void write_tile_manifest(const std::vector<TileManifestEntry>& entries,
                         const std::filesystem::path& path) {
    json arr = json::array();
    for (const TileManifestEntry& e : entries) {
        json item;
        item["z"] = e.index.zoom;
        item["x"] = e.index.x;
        item["y"] = e.index.y;
        item["path"] = e.path;
        item["bounds"] = {e.bounds.west, e.bounds.south, e.bounds.east, e.bounds.north};
        arr.push_back(std::move(item));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write tile manifest: " + path.string());
    out << arr.dump(2) << "\n";
}

std::vector<TileManifestEntry> load_tile_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tile manifest: " + path.string());
    json arr;
    try {
        arr = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("tile manifest " + path.string() + ": " + e.what());
    }
    if (!arr.is_array()) throw ParseError("tile manifest must be a JSON array");

    std::vector<TileManifestEntry> entries;
    entries.reserve(arr.size());
    try {
        for (const json& item : arr) {
            TileManifestEntry e;
            e.index.zoom = item.at("z").get<int>();
            e.index.x = item.at("x").get<std::int64_t>();
            e.index.y = item.at("y").get<std::int64_t>();
            e.path = item.at("path").get<std::string>();
            const auto b = item.at("bounds").get<std::vector<double>>();
            if (b.size() != 4) throw ParseError("manifest bounds must have 4 numbers");
            e.bounds = {b[0], b[1], b[2], b[3]};
            entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw ParseError("tile manifest " + path.string() + ": " + e.what());
    }
    return entries;
}

} // namespace canopy::raster
