#include "commands.hpp"

#include <cstdio>
#include <cstring>

#include "canopy/geo/scene.hpp"
#include "canopy/raster/tiler.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

// Accept either the .raw payload or its .scene.json sidecar.
fs::path resolve_scene_path(const std::string& arg) {
    fs::path p(arg);
    std::string name = p.filename().string();
    constexpr const char* kSidecarSuffix = ".scene.json";
    if (name.size() > std::strlen(kSidecarSuffix) &&
        name.ends_with(kSidecarSuffix)) {
        name.resize(name.size() - std::strlen(kSidecarSuffix));
        p.replace_filename(name + ".raw");
    }
    return p;
}

raster::TilerOptions tiler_options(const TileArgs& a) {
    raster::TilerOptions opt;
    opt.zoom = a.zoom;
    opt.zoom_min = 18;
    opt.zoom_max = 19;
    if (a.nodata < 0 || a.nodata > 65535)
        throw ConfigError("--nodata must be in [0, 65535]");
    opt.nodata = static_cast<std::uint16_t>(a.nodata);
    opt.emit_raw = a.raw;
    opt.jobs = resolve_jobs(a.jobs);
    if (a.stretch == "off") {
        opt.stretch = false;
    } else {
        auto pos = a.stretch.find(',');
        std::size_t used_lo = 0, used_hi = 0;
        try {
            if (pos == std::string::npos) throw std::invalid_argument("");
            opt.stretch_low = std::stod(a.stretch.substr(0, pos), &used_lo);
            opt.stretch_high = std::stod(a.stretch.substr(pos + 1), &used_hi);
        } catch (const std::exception&) {
            throw ConfigError("bad --stretch value '" + a.stretch +
                              "' (expected \"low,high\" percentiles or \"off\")");
        }
        if (used_lo != pos || used_hi != a.stretch.size() - pos - 1)
            throw ConfigError("bad --stretch value '" + a.stretch +
                              "' (expected \"low,high\" percentiles or \"off\")");
        opt.stretch = true;
    }
    return opt;
}

} // namespace

TileStageResult stage_tile(const fs::path& scene_raw, const TileArgs& a,
                           const fs::path& out_dir) {
    geo::SceneRaster scene = geo::SceneRaster::load(scene_raw);
    raster::TilerOptions opt = tiler_options(a);
    auto entries = raster::tile_scene(scene, opt, out_dir);
    raster::write_tile_manifest(entries, out_dir / "manifest.json");
    return {entries.size(), opt.zoom};
}

int run_tile(const TileArgs& a) {
    require_flag(a.scene, "--scene");
    require_flag(a.out, "--out");
    fs::path scene_raw = resolve_scene_path(a.scene);

    RunContext run("tile", a.out, /*dir_mode=*/true);
    run.param("zoom", a.zoom);
    run.param("stretch", a.stretch);
    run.param("raw", a.raw);
    // nodata travels in the run manifest; the tile manifest stays purely
    // geometric (tile ids, paths, bounds).
    run.param("nodata", a.nodata);
    run.input_file("scene", scene_raw);
    run.input_file("scene_descriptor", geo::sidecar_path_for(scene_raw));

    TileStageResult res = stage_tile(scene_raw, a, run.stage());
    run.note("tiles", res.tiles);
    run.finalize();

    std::printf("wrote %zu tiles at zoom %d to %s\n", res.tiles, res.zoom, a.out.c_str());
    return 0;
}

} // namespace canopy::cli
