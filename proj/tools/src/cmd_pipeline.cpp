#include "commands.hpp"
#include "pipeline_config.hpp"

#include <cstdio>

#include "canopy/geo/scene.hpp"
#include "canopy/synth/generate.hpp"
#include "canopy/synth/spec.hpp"
#include "canopy/train/config.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

struct EpochInputs {
    std::string name;
    fs::path scene;       // .raw payload
    fs::path annotations; // directory of annotation documents
    fs::path detections;  // results JSON
};

void require_exists(const fs::path& p, const char* what) {
    if (p.empty() || !fs::exists(p))
        throw ConfigError(std::string(what) + " not found: " + p.string());
}

} // namespace

int run_pipeline(const PipelineArgs& a) {
    require_flag(a.config, "--config");
    PipelineConfig cfg = load_pipeline_config(a.config);
    int jobs = resolve_jobs(a.jobs);

    // Fail on missing inputs before any stage writes anything.
    if (cfg.synth_spec) {
        require_exists(*cfg.synth_spec, "synth spec");
    } else {
        require_exists(cfg.scene_earlier, "earlier scene");
        require_exists(cfg.scene_later, "later scene");
        require_exists(cfg.annotations_earlier, "earlier annotations");
        require_exists(cfg.annotations_later, "later annotations");
        require_exists(cfg.detections_earlier, "earlier detections");
        require_exists(cfg.detections_later, "later detections");
        if (!cfg.regions.empty()) require_exists(cfg.regions, "regions file");
    }
    if (cfg.train_config) require_exists(*cfg.train_config, "train config");
    std::vector<double> thresholds = parse_iou_spec(cfg.iou);

    RunContext run("pipeline", cfg.out, /*dir_mode=*/true);
    run.param("zoom", cfg.zoom);
    run.param("stretch", cfg.stretch);
    run.param("split_seed", static_cast<std::int64_t>(cfg.split_seed));
    run.param("iou", cfg.iou);
    run.param("dedupe_iou", cfg.dedupe_iou);
    run.param("max_dist", cfg.max_dist);
    run.param("strategy", cfg.strategy);
    run.input_file("config", a.config);
    const fs::path& stage = run.stage();

    // --- fixture / inputs ---------------------------------------------------
    EpochInputs earlier, later;
    fs::path regions_file;
    if (cfg.synth_spec) {
        run.input_file("synth_spec", *cfg.synth_spec);
        synth::SynthSpec spec = synth::load_synth_spec(*cfg.synth_spec);
        std::printf("[1/6] synth: %d trees, epochs %s -> %s\n", spec.tree_count,
                    spec.earlier_epoch.c_str(), spec.later_epoch.c_str());
        synth::FixturePaths fx = synth::generate_fixture(spec, stage / "fixture");
        earlier = {spec.earlier_epoch, fx.earlier_scene, fx.earlier_annotations,
                   fx.earlier_detections};
        later = {spec.later_epoch, fx.later_scene, fx.later_annotations, fx.later_detections};
        regions_file = fx.regions;
    } else {
        run.input_file("scene_earlier", cfg.scene_earlier);
        run.input_file("scene_later", cfg.scene_later);
        run.input_dir("annotations_earlier", cfg.annotations_earlier);
        run.input_dir("annotations_later", cfg.annotations_later);
        run.input_file("detections_earlier", cfg.detections_earlier);
        run.input_file("detections_later", cfg.detections_later);
        earlier.scene = cfg.scene_earlier;
        earlier.annotations = cfg.annotations_earlier;
        earlier.detections = cfg.detections_earlier;
        later.scene = cfg.scene_later;
        later.annotations = cfg.annotations_later;
        later.detections = cfg.detections_later;
        earlier.name = geo::load_scene_descriptor(geo::sidecar_path_for(cfg.scene_earlier)).date;
        later.name = geo::load_scene_descriptor(geo::sidecar_path_for(cfg.scene_later)).date;
        if (!cfg.regions.empty()) {
            regions_file = cfg.regions;
            run.input_file("regions", cfg.regions);
        }
        std::printf("[1/6] inputs: epochs %s -> %s\n", earlier.name.c_str(),
                    later.name.c_str());
    }
    if (earlier.name == later.name)
        throw DomainError("both scenes carry the same acquisition date '" + earlier.name +
                          "'; change detection needs two distinct epochs");

    // --- tile ----------------------------------------------------------------
    TileArgs tile_args;
    tile_args.zoom = cfg.zoom;
    tile_args.stretch = cfg.stretch;
    tile_args.raw = cfg.tile_raw;
    tile_args.nodata = cfg.nodata;
    tile_args.jobs = jobs;
    for (const EpochInputs* epoch : {&earlier, &later}) {
        fs::path out = stage / "tiles" / epoch->name;
        fs::create_directories(out);
        TileStageResult res = stage_tile(epoch->scene, tile_args, out);
        std::printf("[2/6] tile %s: %zu tiles at zoom %d\n", epoch->name.c_str(), res.tiles,
                    res.zoom);
    }

    // --- split ----------------------------------------------------------------
    for (const EpochInputs* epoch : {&earlier, &later}) {
        fs::path out = stage / "split" / epoch->name;
        fs::create_directories(out);
        SplitStageResult res =
            stage_split(epoch->annotations, cfg.split_seed, cfg.ratios, cfg.masks, out);
        std::printf("[3/6] split %s: train=%zu val=%zu test=%zu\n", epoch->name.c_str(),
                    res.train, res.val, res.test);
    }

    // --- ingest ----------------------------------------------------------------
    fs::path instances_dir = stage / "instances";
    fs::create_directories(instances_dir);
    for (const EpochInputs* epoch : {&earlier, &later}) {
        IngestStageResult res = stage_ingest(
            epoch->detections, stage / "tiles" / epoch->name / "manifest.json", epoch->name,
            cfg.epsg, cfg.dedupe_iou, instances_dir / (epoch->name + ".geojson"));
        std::printf("[4/6] ingest %s: %zu detections -> %zu instances (EPSG:%d)\n",
                    epoch->name.c_str(), res.raw_detections, res.scene_instances, res.epsg);
    }

    // --- eval ----------------------------------------------------------------
    for (const EpochInputs* epoch : {&earlier, &later}) {
        fs::path out = stage / "eval" / epoch->name;
        fs::create_directories(out);
        EvalStageResult res =
            stage_eval(epoch->annotations, epoch->detections, thresholds, cfg.eval_masks,
                       cfg.all_points, out / "summary.json");
        std::printf("[5/6] eval %s: mAP box=%.4f", epoch->name.c_str(), res.map_box);
        if (res.with_masks) std::printf(" mask=%.4f", res.map_mask);
        std::printf(" over %zu images\n", res.images);
    }

    // --- change ----------------------------------------------------------------
    fs::path report_dir = stage / "report";
    fs::create_directories(report_dir);
    std::optional<fs::path> regions;
    if (!regions_file.empty()) regions = regions_file;
    ChangeStageResult res =
        stage_change(instances_dir / (earlier.name + ".geojson"),
                     instances_dir / (later.name + ".geojson"), regions, cfg.max_dist,
                     cfg.strategy, report_dir);
    std::printf("[6/6] change: persisted=%zu gained=%zu lost=%zu\n", res.persisted, res.gained,
                res.lost);

    if (cfg.train_config) {
        train::TrainConfig tc = train::load_train_config(*cfg.train_config);
        tc.validate(cfg.allow_custom_train);
        train::save_train_config(tc, stage / "train_config.cfg");
        run.input_file("train_config", *cfg.train_config);
    }

    run.note("persisted", res.persisted);
    run.note("gained", res.gained);
    run.note("lost", res.lost);
    run.finalize();
    std::printf("pipeline complete: %s\n", cfg.out.string().c_str());
    return 0;
}

} // namespace canopy::cli
