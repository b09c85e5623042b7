#include "pipeline_config.hpp"

#include <set>

#include "canopy/util/error.hpp"
#include "canopy/util/toml_lite.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownKeys = {
    "paths.out",
    "paths.scene_earlier", "paths.scene_later",
    "paths.annotations_earlier", "paths.annotations_later",
    "paths.detections_earlier", "paths.detections_later",
    "paths.regions",
    "synth.spec",
    "tile.zoom", "tile.stretch", "tile.raw", "tile.nodata",
    "split.seed", "split.ratios", "split.masks",
    "eval.iou", "eval.masks", "eval.all_points",
    "ingest.dedupe_iou", "ingest.epsg",
    "change.max_dist", "change.strategy",
    "train.config", "train.allow_custom",
};

} // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    util::TomlDoc doc = util::TomlDoc::parse_file(path);
    for (const auto& key : doc.keys()) {
        if (!kKnownKeys.count(key))
            throw ConfigError(path.string() + ":" + std::to_string(doc.line_of(key)) +
                              ": unknown key '" + key + "'");
    }

    PipelineConfig cfg;
    cfg.base = path.parent_path();
    auto resolve = [&](const std::string& rel) -> fs::path {
        fs::path p(rel);
        return p.is_absolute() ? p : cfg.base / p;
    };

    cfg.out = resolve(doc.get_string("paths.out"));

    if (doc.has("synth.spec")) cfg.synth_spec = resolve(doc.get_string("synth.spec"));

    auto path_or = [&](const char* key) -> fs::path {
        return doc.has(key) ? resolve(doc.get_string(key)) : fs::path();
    };
    cfg.scene_earlier = path_or("paths.scene_earlier");
    cfg.scene_later = path_or("paths.scene_later");
    cfg.annotations_earlier = path_or("paths.annotations_earlier");
    cfg.annotations_later = path_or("paths.annotations_later");
    cfg.detections_earlier = path_or("paths.detections_earlier");
    cfg.detections_later = path_or("paths.detections_later");
    cfg.regions = path_or("paths.regions");

    if (!cfg.synth_spec) {
        for (const char* key : {"paths.scene_earlier", "paths.scene_later",
                                "paths.annotations_earlier", "paths.annotations_later",
                                "paths.detections_earlier", "paths.detections_later"}) {
            if (!doc.has(key))
                throw ConfigError(path.string() + ": key '" + key +
                                  "' is required when no [synth] block is given");
        }
    }

    cfg.zoom = static_cast<int>(doc.get_int_or("tile.zoom", cfg.zoom));
    cfg.stretch = doc.get_string_or("tile.stretch", cfg.stretch);
    cfg.tile_raw = doc.get_bool_or("tile.raw", cfg.tile_raw);
    cfg.nodata = static_cast<int>(doc.get_int_or("tile.nodata", cfg.nodata));

    std::int64_t seed = doc.get_int_or("split.seed", 0);
    if (seed < 0)
        throw ConfigError(path.string() + ": split.seed must be non-negative");
    cfg.split_seed = static_cast<std::uint64_t>(seed);
    if (doc.has("split.ratios")) {
        auto r = doc.get_double_array("split.ratios");
        if (r.size() != 3)
            throw ConfigError(path.string() + ":" +
                              std::to_string(doc.line_of("split.ratios")) +
                              ": split.ratios needs exactly three numbers");
        cfg.ratios = {r[0], r[1], r[2]};
    }
    cfg.masks = doc.get_bool_or("split.masks", cfg.masks);

    cfg.iou = doc.get_string_or("eval.iou", cfg.iou);
    cfg.eval_masks = doc.get_bool_or("eval.masks", cfg.eval_masks);
    cfg.all_points = doc.get_bool_or("eval.all_points", cfg.all_points);

    cfg.dedupe_iou = doc.get_double_or("ingest.dedupe_iou", cfg.dedupe_iou);
    cfg.epsg = static_cast<int>(doc.get_int_or("ingest.epsg", 0));

    cfg.max_dist = doc.get_double_or("change.max_dist", cfg.max_dist);
    cfg.strategy = doc.get_string_or("change.strategy", cfg.strategy);

    if (doc.has("train.config")) cfg.train_config = resolve(doc.get_string("train.config"));
    cfg.allow_custom_train = doc.get_bool_or("train.allow_custom", false);

    return cfg;
}

} // namespace canopy::cli
