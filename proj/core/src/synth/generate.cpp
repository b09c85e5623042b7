#include "canopy/synth/generate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "canopy/detect/geojson.hpp"
#include "canopy/geo/projection.hpp"
#include "canopy/geo/scene.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

namespace canopy::synth {

using nlohmann::json;

std::vector<geo::Vec2> crown_polygon(const geo::Vec2& center, double radius) {
    std::vector<geo::Vec2> ring;
    ring.reserve(kCrownVertexCount);
    for (int k = 0; k < kCrownVertexCount; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / kCrownVertexCount;
        ring.push_back({center.x + radius * std::cos(theta),
                        center.y + radius * std::sin(theta)});
    }
    return ring;
}

geo::TileIndex crown_tile(int epsg, const geo::Vec2& center, int zoom) {
    const geo::LonLat ll = geo::projected_to_lonlat(epsg, center);
    return geo::lonlat_to_tile(ll.lon, ll.lat, zoom);
}

std::vector<geo::Vec2> crown_tile_polygon(int epsg, const geo::Vec2& center, double radius,
                                          const geo::TileIndex& tile) {
    std::vector<geo::Vec2> px;
    px.reserve(kCrownVertexCount);
    for (const geo::Vec2& v : crown_polygon(center, radius)) {
        const geo::LonLat ll = geo::projected_to_lonlat(epsg, v);
        const geo::Vec2 merc = geo::lonlat_to_mercator(ll.lon, ll.lat);
        px.push_back(geo::mercator_to_tile_pixel(tile, merc.x, merc.y));
    }
    return geo::clip_polygon_box(px, 0.0, 0.0, geo::kTileSizePx, geo::kTileSizePx);
}

namespace {

constexpr const char* kTreeLabel = "tree";

std::string tile_str(const geo::TileIndex& t) {
    return std::to_string(t.zoom) + "/" + std::to_string(t.x) + "/" + std::to_string(t.y);
}

std::string tile_file_stem(const geo::TileIndex& t) {
    return std::to_string(t.zoom) + "_" + std::to_string(t.x) + "_" + std::to_string(t.y);
}

// The whole clearance square around a crown must land in one tile so that
// jitter and outline noise can never push a polygon across a seam.
bool square_in_one_tile(int epsg, const geo::Vec2& center, double half, int zoom,
                        geo::TileIndex* tile_out) {
    const geo::TileIndex tile = crown_tile(epsg, center, zoom);
    for (const double dx : {-half, half}) {
        for (const double dy : {-half, half}) {
            const geo::Vec2 corner{center.x + dx, center.y + dy};
            if (!(crown_tile(epsg, corner, zoom) == tile)) return false;
        }
    }
    if (tile_out) *tile_out = tile;
    return true;
}

struct PlacementFrame {
    int epsg = 0;
    int zoom = 18;
    geo::Bounds scene;  // projected
    double margin = 0.0; // jitter + outline noise + seam clearance, meters
};

// Rejection-samples a center keeping `spacing` to every point in `taken`,
// the crown + margin inside the scene, and the clearance square inside a
// single tile. Returns false when the attempt budget runs out.
bool sample_center(Rng& rng, const PlacementFrame& frame, double radius,
                   double spacing, const std::vector<geo::Vec2>& taken, int attempts,
                   geo::Vec2* out, geo::TileIndex* tile_out) {
    const double clearance = radius + frame.margin + 1.0;
    const double x0 = frame.scene.minx + clearance, x1 = frame.scene.maxx - clearance;
    const double y0 = frame.scene.miny + clearance, y1 = frame.scene.maxy - clearance;
    if (!(x0 < x1 && y0 < y1)) return false;
    for (int a = 0; a < attempts; ++a) {
        const geo::Vec2 c{rng.uniform(x0, x1), rng.uniform(y0, y1)};
        bool ok = true;
        for (const geo::Vec2& t : taken) {
            if (std::hypot(c.x - t.x, c.y - t.y) < spacing) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        if (!square_in_one_tile(frame.epsg, c, clearance, frame.zoom, tile_out)) continue;
        *out = c;
        return true;
    }
    return false;
}

// Draw k distinct indices from 0..n-1 (partial Fisher-Yates, stable given
// the stream position).
std::vector<int> pick_indices(Rng& rng, int n, int k) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < k && i < n; ++i) {
        const int j = static_cast<int>(rng.uniform_int(i, n - 1));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(std::min(k, n));
    std::sort(idx.begin(), idx.end());
    return idx;
}

uint16_t clamp_u16(double v) {
    return static_cast<uint16_t>(std::lround(std::clamp(v, 0.0, 65535.0)));
}

void render_scene(geo::SceneRaster& raster, const TruthLedger& ledger,
                  const std::string& epoch, std::uint64_t texture_salt) {
    const geo::SceneDescriptor& d = raster.desc;
    // 4-band look: visible bands darker, NIR-style band brighter over canopy
    static constexpr double kBgBase[4] = {9000.0, 11000.0, 8000.0, 14000.0};
    static constexpr double kTreeBase[4] = {15000.0, 22000.0, 12000.0, 44000.0};
    static constexpr double kBgAmp = 2500.0;
    static constexpr double kTreeAmp = 3500.0;

    for (int band = 0; band < d.bands; ++band) {
        for (int row = 0; row < d.height; ++row) {
            for (int col = 0; col < d.width; ++col) {
                const double n = hash01(col, row, band, texture_salt);
                raster.at(band, row, col) = clamp_u16(kBgBase[band % 4] + kBgAmp * n);
            }
        }
    }

    const double gsd = d.gsd_m;
    const auto& gt = d.transform;
    int tree_index = -1;
    for (const TruthTree& tree : ledger.trees) {
        ++tree_index;
        if (!ledger.tree_in_epoch(tree, epoch)) continue;
        const geo::Vec2 c = ledger.tree_center(tree, epoch);
        const double r = tree.radius_m;
        const geo::Vec2 p0 = gt.geo_to_pixel(c.x - r - gsd, c.y + r + gsd);
        const geo::Vec2 p1 = gt.geo_to_pixel(c.x + r + gsd, c.y - r - gsd);
        const int col0 = std::max(0, static_cast<int>(std::floor(p0.x)));
        const int row0 = std::max(0, static_cast<int>(std::floor(p0.y)));
        const int col1 = std::min(d.width - 1, static_cast<int>(std::ceil(p1.x)));
        const int row1 = std::min(d.height - 1, static_cast<int>(std::ceil(p1.y)));
        const std::uint64_t dither_salt = texture_salt ^ mix64(tree_index + 1);
        for (int row = row0; row <= row1; ++row) {
            for (int col = col0; col <= col1; ++col) {
                const geo::Vec2 g = gt.pixel_to_geo(col + 0.5, row + 0.5);
                const double dist = std::hypot(g.x - c.x, g.y - c.y);
                const double half = 0.5 * gsd;
                bool inside;
                if (dist <= r - half) {
                    inside = true;
                } else if (dist >= r + half) {
                    inside = false;
                } else {
                    // dithered edge: probability = approximate pixel coverage
                    const double coverage = (r + half - dist) / gsd;
                    inside = hash01(col, row, 7, dither_salt) < coverage;
                }
                if (!inside) continue;
                for (int band = 0; band < d.bands; ++band) {
                    const double n = hash01(col, row, band, texture_salt ^ 0x5eedULL);
                    raster.at(band, row, col) =
                        clamp_u16(kTreeBase[band % 4] + kTreeAmp * n);
                }
            }
        }
    }
}

json polygon_points_json(const std::vector<geo::Vec2>& pts) {
    json arr = json::array();
    for (const geo::Vec2& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

void write_annotations(const TruthLedger& ledger, const std::string& epoch,
                       const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::map<geo::TileIndex, std::vector<const TruthTree*>> by_tile;
    for (const TruthTree& tree : ledger.trees) {
        if (!ledger.tree_in_epoch(tree, epoch)) continue;
        const geo::TileIndex tile =
            crown_tile(ledger.epsg, ledger.tree_center(tree, epoch), ledger.zoom);
        by_tile[tile].push_back(&tree);
    }
    for (const auto& [tile, trees] : by_tile) {
        json doc;
        doc["version"] = "5.2.1";
        doc["flags"] = json::object();
        json shapes = json::array();
        for (const TruthTree* tree : trees) {
            const std::vector<geo::Vec2> pts = crown_tile_polygon(
                ledger.epsg, ledger.tree_center(*tree, epoch), tree->radius_m, tile);
            if (pts.size() < 3) continue;
            json shape;
            shape["label"] = kTreeLabel;
            shape["points"] = polygon_points_json(pts);
            shape["group_id"] = nullptr;
            shape["shape_type"] = "polygon";
            shape["flags"] = json::object();
            shapes.push_back(std::move(shape));
        }
        doc["shapes"] = std::move(shapes);
        doc["imagePath"] = tile_str(tile) + ".png";
        doc["imageData"] = nullptr;
        doc["imageHeight"] = geo::kTileSizePx;
        doc["imageWidth"] = geo::kTileSizePx;

        const std::filesystem::path file = dir / (tile_file_stem(tile) + ".json");
        std::ofstream out(file);
        if (!out) throw IoError("cannot write annotation: " + file.string());
        out << doc.dump(2) << "\n";
    }
}

std::vector<detect::RegionDef> build_regions(const geo::LonLatBox& extent, int count) {
    std::vector<detect::RegionDef> regions;
    if (count <= 0) return regions;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const double dw = (extent.east - extent.west) / cols;
    const double dh = (extent.north - extent.south) / rows;
    const double inset_x = 0.08 * dw, inset_y = 0.08 * dh;
    for (int r = 0; r < rows && static_cast<int>(regions.size()) < count; ++r) {
        for (int c = 0; c < cols && static_cast<int>(regions.size()) < count; ++c) {
            const double w = extent.west + c * dw + inset_x;
            const double e = extent.west + (c + 1) * dw - inset_x;
            const double s = extent.south + r * dh + inset_y;
            const double n = extent.south + (r + 1) * dh - inset_y;
            detect::RegionDef def;
            def.id = "region_" + std::to_string(regions.size() + 1);
            def.polygon = {{w, s}, {e, s}, {e, n}, {w, n}};
            regions.push_back(std::move(def));
        }
    }
    return regions;
}

json tree_to_json(const TruthTree& t) {
    json j;
    j["id"] = t.id;
    j["radius_m"] = t.radius_m;
    j["fate"] = t.fate;
    j["area_m2"] = t.area_m2;
    j["region"] = t.region;
    j["displacement_m"] = t.displacement_m;
    if (t.has_earlier) j["earlier"] = {{"x", t.earlier.x}, {"y", t.earlier.y}};
    else j["earlier"] = nullptr;
    if (t.has_later) j["later"] = {{"x", t.later.x}, {"y", t.later.y}};
    else j["later"] = nullptr;
    return j;
}

TruthTree tree_from_json(const json& j) {
    TruthTree t;
    t.id = j.at("id").get<std::string>();
    t.radius_m = j.at("radius_m").get<double>();
    t.fate = j.at("fate").get<std::string>();
    t.area_m2 = j.value("area_m2", 0.0);
    t.region = j.value("region", std::string());
    t.displacement_m = j.value("displacement_m", 0.0);
    if (j.contains("earlier") && !j["earlier"].is_null()) {
        t.has_earlier = true;
        t.earlier = {j["earlier"].at("x").get<double>(), j["earlier"].at("y").get<double>()};
    }
    if (j.contains("later") && !j["later"].is_null()) {
        t.has_later = true;
        t.later = {j["later"].at("x").get<double>(), j["later"].at("y").get<double>()};
    }
    return t;
}

} // namespace

void save_truth_ledger(const TruthLedger& ledger, const std::filesystem::path& path) {
    json doc;
    doc["seed"] = ledger.seed;
    doc["epsg"] = ledger.epsg;
    doc["zoom"] = ledger.zoom;
    doc["gsd_m"] = ledger.gsd_m;
    doc["epochs"] = {{"earlier", ledger.earlier_epoch}, {"later", ledger.later_epoch}};
    doc["min_spacing_m"] = ledger.min_spacing_m;
    doc["jitter_m"] = ledger.jitter_m;
    doc["crown_radius_m"] = {ledger.crown_radius_min_m, ledger.crown_radius_max_m};
    doc["scene_bounds"] = {{"minx", ledger.scene_bounds.minx},
                           {"miny", ledger.scene_bounds.miny},
                           {"maxx", ledger.scene_bounds.maxx},
                           {"maxy", ledger.scene_bounds.maxy}};
    json trees = json::array();
    for (const TruthTree& t : ledger.trees) trees.push_back(tree_to_json(t));
    doc["trees"] = std::move(trees);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write truth ledger: " + path.string());
    out << doc.dump(2) << "\n";
}

TruthLedger load_truth_ledger(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth ledger: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    TruthLedger ledger;
    try {
        ledger.seed = doc.at("seed").get<std::uint64_t>();
        ledger.epsg = doc.at("epsg").get<int>();
        ledger.zoom = doc.at("zoom").get<int>();
        ledger.gsd_m = doc.at("gsd_m").get<double>();
        ledger.earlier_epoch = doc.at("epochs").at("earlier").get<std::string>();
        ledger.later_epoch = doc.at("epochs").at("later").get<std::string>();
        ledger.min_spacing_m = doc.value("min_spacing_m", 0.0);
        ledger.jitter_m = doc.value("jitter_m", 0.0);
        if (doc.contains("crown_radius_m")) {
            ledger.crown_radius_min_m = doc["crown_radius_m"][0].get<double>();
            ledger.crown_radius_max_m = doc["crown_radius_m"][1].get<double>();
        }
        const json& sb = doc.at("scene_bounds");
        ledger.scene_bounds = {sb.at("minx").get<double>(), sb.at("miny").get<double>(),
                               sb.at("maxx").get<double>(), sb.at("maxy").get<double>()};
        for (const json& t : doc.at("trees")) ledger.trees.push_back(tree_from_json(t));
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return ledger;
}

FixturePaths generate_fixture(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    const geo::LonLat center{(spec.extent.west + spec.extent.east) / 2.0,
                             (spec.extent.south + spec.extent.north) / 2.0};
    const int epsg = geo::utm_epsg_for(center);

    // Projected scene frame covering the requested extent.
    geo::Bounds scene{1e300, 1e300, -1e300, -1e300};
    for (const geo::LonLat corner :
         {geo::LonLat{spec.extent.west, spec.extent.south},
          geo::LonLat{spec.extent.east, spec.extent.south},
          geo::LonLat{spec.extent.west, spec.extent.north},
          geo::LonLat{spec.extent.east, spec.extent.north}}) {
        const geo::Vec2 p = geo::lonlat_to_projected(epsg, corner);
        scene.minx = std::min(scene.minx, p.x);
        scene.miny = std::min(scene.miny, p.y);
        scene.maxx = std::max(scene.maxx, p.x);
        scene.maxy = std::max(scene.maxy, p.y);
    }
    const int width = std::max(1, static_cast<int>(std::ceil(scene.width() / spec.gsd_m)));
    const int height = std::max(1, static_cast<int>(std::ceil(scene.height() / spec.gsd_m)));

    TruthLedger ledger;
    ledger.seed = spec.seed;
    ledger.epsg = epsg;
    ledger.zoom = spec.zoom;
    ledger.gsd_m = spec.gsd_m;
    ledger.earlier_epoch = spec.earlier_epoch;
    ledger.later_epoch = spec.later_epoch;
    ledger.min_spacing_m = spec.spacing();
    ledger.jitter_m = spec.edits.jitter_m;
    ledger.crown_radius_min_m = spec.crown_radius_min_m;
    ledger.crown_radius_max_m = spec.crown_radius_max_m;
    ledger.scene_bounds = scene;

    PlacementFrame frame;
    frame.epsg = epsg;
    frame.zoom = spec.zoom;
    frame.scene = scene;
    frame.margin = spec.seam_margin_m + spec.edits.jitter_m +
                   spec.detector.boundary_noise_px * spec.gsd_m;

    // Base layout (epoch-1 positions).
    Rng layout_rng = Rng::stream(spec.seed, "synth.layout");
    std::vector<geo::Vec2> taken;
    const int per_tree_attempts = 2000;
    for (int i = 0; i < spec.tree_count; ++i) {
        const double radius = layout_rng.uniform(spec.crown_radius_min_m, spec.crown_radius_max_m);
        geo::Vec2 c;
        if (!sample_center(layout_rng, frame, radius, spec.spacing(), taken,
                           per_tree_attempts, &c, nullptr)) {
            throw DomainError(
                "tree layout infeasible: placed " + std::to_string(i) + " of " +
                std::to_string(spec.tree_count) +
                " trees (extent too small for the spacing/seam constraints)");
        }
        taken.push_back(c);
        TruthTree tree;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "t%04d", i + 1);
        tree.id = buf;
        tree.radius_m = radius;
        tree.fate = "persisted";
        tree.has_earlier = true;
        tree.earlier = c;
        ledger.trees.push_back(std::move(tree));
    }

    // Epoch-2 edits: removals, jitter, additions.
    Rng edits_rng = Rng::stream(spec.seed, "synth.edits");
    const int n = static_cast<int>(ledger.trees.size());
    const int k_remove = static_cast<int>(std::lround(spec.edits.remove_fraction * n));
    for (const int idx : pick_indices(edits_rng, n, k_remove)) {
        ledger.trees[idx].fate = "removed";
    }
    std::vector<int> survivors;
    for (int i = 0; i < n; ++i) {
        if (ledger.trees[i].fate == "persisted") survivors.push_back(i);
    }
    const int k_jitter =
        static_cast<int>(std::lround(spec.edits.jitter_fraction * survivors.size()));
    std::vector<char> jittered(survivors.size(), 0);
    for (const int s : pick_indices(edits_rng, static_cast<int>(survivors.size()), k_jitter))
        jittered[s] = 1;
    for (std::size_t s = 0; s < survivors.size(); ++s) {
        TruthTree& tree = ledger.trees[survivors[s]];
        tree.has_later = true;
        tree.later = tree.earlier;
        if (jittered[s] && spec.edits.jitter_m > 0.0) {
            const double angle = edits_rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double mag = edits_rng.uniform(0.0, spec.edits.jitter_m);
            tree.later = {tree.earlier.x + mag * std::cos(angle),
                          tree.earlier.y + mag * std::sin(angle)};
            tree.displacement_m = mag;
        }
    }
    const int k_add = static_cast<int>(std::lround(spec.edits.add_fraction * n));
    std::vector<geo::Vec2> all_positions = taken;
    for (const int s : survivors) all_positions.push_back(ledger.trees[s].later);
    for (int a = 0; a < k_add; ++a) {
        const double radius = edits_rng.uniform(spec.crown_radius_min_m, spec.crown_radius_max_m);
        geo::Vec2 c;
        if (!sample_center(edits_rng, frame, radius, spec.spacing(), all_positions,
                           per_tree_attempts, &c, nullptr)) {
            throw DomainError("tree layout infeasible: could not place added tree " +
                                    std::to_string(a + 1) + " of " + std::to_string(k_add));
        }
        all_positions.push_back(c);
        TruthTree tree;
        char buf[16];
        std::snprintf(buf, sizeof(buf), "t%04d", n + a + 1);
        tree.id = buf;
        tree.radius_m = radius;
        tree.fate = "added";
        tree.has_later = true;
        tree.later = c;
        ledger.trees.push_back(std::move(tree));
    }

    // Regions and per-tree attribution (later-epoch position when present).
    const std::vector<detect::RegionDef> regions = build_regions(spec.extent, spec.region_count);
    std::vector<std::vector<geo::Vec2>> region_rings;
    for (const detect::RegionDef& r : regions) {
        std::vector<geo::Vec2> ring;
        for (const geo::LonLat& p : r.polygon) ring.push_back({p.lon, p.lat});
        region_rings.push_back(std::move(ring));
    }
    for (TruthTree& tree : ledger.trees) {
        const geo::Vec2 pos = tree.has_later ? tree.later : tree.earlier;
        const geo::LonLat ll = geo::projected_to_lonlat(epsg, pos);
        for (std::size_t r = 0; r < region_rings.size(); ++r) {
            if (geo::point_in_polygon({ll.lon, ll.lat}, region_rings[r])) {
                tree.region = regions[r].id;
                break;
            }
        }
        tree.area_m2 = geo::rasterized_area(
            crown_polygon(pos, tree.radius_m), kTruthAreaCellM);
    }

    // Scene rasters.
    FixturePaths paths;
    const std::string epochs[2] = {spec.earlier_epoch, spec.later_epoch};
    for (int e = 0; e < 2; ++e) {
        geo::SceneRaster raster;
        raster.desc.width = width;
        raster.desc.height = height;
        raster.desc.bands = 4;
        raster.desc.dtype = geo::SampleType::u16;
        raster.desc.transform = geo::GeoTransform(
            {scene.minx, spec.gsd_m, 0.0, scene.maxy, 0.0, -spec.gsd_m});
        raster.desc.epsg = epsg;
        raster.desc.date = epochs[e];
        raster.desc.gsd_m = spec.gsd_m;
        raster.samples.assign(
            static_cast<std::size_t>(width) * height * raster.desc.bands, 0);
        const std::uint64_t salt = mix64(spec.seed ^ fnv1a64("synth.texture." + epochs[e]));
        render_scene(raster, ledger, epochs[e], salt);
        const std::filesystem::path raw = out_dir / (epochs[e] + ".raw");
        raster.save(raw);
        (e == 0 ? paths.earlier_scene : paths.later_scene) = raw;
    }

    // Annotations and detections.
    paths.earlier_annotations = out_dir / "annotations" / spec.earlier_epoch;
    paths.later_annotations = out_dir / "annotations" / spec.later_epoch;
    write_annotations(ledger, spec.earlier_epoch, paths.earlier_annotations);
    write_annotations(ledger, spec.later_epoch, paths.later_annotations);

    std::filesystem::create_directories(out_dir / "detections");
    paths.earlier_detections = out_dir / "detections" / (spec.earlier_epoch + ".json");
    paths.later_detections = out_dir / "detections" / (spec.later_epoch + ".json");
    simulate_detector(ledger, spec.detector, spec.earlier_epoch, spec.seed,
                      paths.earlier_detections);
    simulate_detector(ledger, spec.detector, spec.later_epoch, spec.seed,
                      paths.later_detections);

    paths.regions = out_dir / "regions.geojson";
    detect::write_regions_geojson(regions, paths.regions);

    paths.ledger = out_dir / "truth_ledger.json";
    save_truth_ledger(ledger, paths.ledger);
    return paths;
}

void simulate_detector(const TruthLedger& ledger, const DetectorNoise& noise,
                       const std::string& epoch, std::uint64_t seed,
                       const std::filesystem::path& out_file) {
    if (epoch != ledger.earlier_epoch && epoch != ledger.later_epoch)
        throw DomainError("epoch '" + epoch + "' not present in the truth ledger");
    Rng rng = Rng::stream(seed, "synth.detector." + epoch);

    json results = json::array();
    auto emit = [&](const geo::Vec2& center, double radius) {
        const geo::TileIndex tile = crown_tile(ledger.epsg, center, ledger.zoom);
        std::vector<geo::Vec2> pts =
            crown_tile_polygon(ledger.epsg, center, radius, tile);
        if (noise.boundary_noise_px > 0.0) {
            for (geo::Vec2& p : pts) {
                p.x += rng.normal(0.0, noise.boundary_noise_px);
                p.y += rng.normal(0.0, noise.boundary_noise_px);
            }
            pts = geo::clip_polygon_box(pts, 0.0, 0.0, geo::kTileSizePx, geo::kTileSizePx);
        }
        if (pts.size() < 3) return;
        const geo::Bounds b = geo::polygon_bounds(pts);
        json rec;
        rec["tile"] = tile_str(tile);
        rec["label"] = kTreeLabel;
        rec["score"] = rng.uniform(noise.score_min, noise.score_max);
        rec["bbox"] = {b.minx, b.miny, b.width(), b.height()};
        rec["polygon"] = polygon_points_json(pts);
        results.push_back(std::move(rec));
    };

    std::vector<geo::Vec2> positions;
    for (const TruthTree& tree : ledger.trees) {
        if (!ledger.tree_in_epoch(tree, epoch)) continue;
        positions.push_back(ledger.tree_center(tree, epoch));
    }
    int count = 0;
    for (const TruthTree& tree : ledger.trees) {
        if (!ledger.tree_in_epoch(tree, epoch)) continue;
        ++count;
        if (rng.bernoulli(noise.miss_rate)) continue;
        emit(ledger.tree_center(tree, epoch), tree.radius_m);
    }

    // False positives: expected fp_rate per true tree, placed with the same
    // spacing constraint so they never overlap a real crown.
    if (noise.fp_rate > 0.0) {
        PlacementFrame frame;
        frame.epsg = ledger.epsg;
        frame.zoom = ledger.zoom;
        frame.scene = ledger.scene_bounds;
        frame.margin = 1.0;
        const double rmin = ledger.crown_radius_min_m > 0 ? ledger.crown_radius_min_m : 1.5;
        const double rmax = ledger.crown_radius_max_m >= rmin ? ledger.crown_radius_max_m : rmin;
        for (int i = 0; i < count; ++i) {
            if (!rng.bernoulli(noise.fp_rate)) continue;
            const double radius = rng.uniform(rmin, rmax);
            geo::Vec2 c;
            if (sample_center(rng, frame, radius, ledger.min_spacing_m, positions, 200, &c,
                              nullptr)) {
                positions.push_back(c);
                emit(c, radius);
            }
        }
    }

    std::ofstream out(out_file);
    if (!out) throw IoError("cannot write detections: " + out_file.string());
    out << results.dump(2) << "\n";
}

} // namespace canopy::synth
