#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace canopy::cli {

// End-to-end run description, loaded from a small TOML file. Either a
// [synth] block generates the whole fixture, or [paths] points at existing
// scenes / annotations / detections. Unknown keys are rejected with their
// line number so typos fail before any stage runs.
struct PipelineConfig {
    std::filesystem::path base; // directory of the config file

    std::filesystem::path out;

    std::optional<std::filesystem::path> synth_spec;

    // direct inputs (ignored when synth_spec is set)
    std::filesystem::path scene_earlier, scene_later;
    std::filesystem::path annotations_earlier, annotations_later;
    std::filesystem::path detections_earlier, detections_later;
    std::filesystem::path regions; // optional

    // [tile]
    int zoom = 18;
    std::string stretch = "2,98";
    bool tile_raw = false;
    int nodata = 0;

    // [split]
    std::uint64_t split_seed = 0;
    std::array<double, 3> ratios{0.7, 0.2, 0.1};
    bool masks = false;

    // [eval]
    std::string iou = "0.5:0.95";
    bool eval_masks = true;
    bool all_points = false;

    // [ingest]
    double dedupe_iou = 0.5;
    int epsg = 0;

    // [change]
    double max_dist = 2.5;
    std::string strategy = "greedy";

    // [train] (optional: validated and re-emitted alongside the outputs)
    std::optional<std::filesystem::path> train_config;
    bool allow_custom_train = false;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

} // namespace canopy::cli
