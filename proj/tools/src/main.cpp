#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "canopy/util/error.hpp"
#include "commands.hpp"

namespace cli = canopy::cli;

int main(int argc, char** argv) {
    CLI::App app{"tree-canopy change detection pipeline"};
    app.set_version_flag("--version", std::string(cli::kToolName) + " " + cli::kToolVersion);
    app.require_subcommand(0, 1);

    // Required flags are enforced by the commands themselves (exit 1 with the
    // flag name) rather than by the parser, so a forgotten flag is a
    // validation failure, not a usage error.

    cli::TileArgs tile;
    auto* tile_cmd = app.add_subcommand("tile", "cut a scene raster into z/x/y map tiles");
    tile_cmd->add_option("--scene", tile.scene, "scene payload (.raw) or its .scene.json");
    tile_cmd->add_option("--zoom", tile.zoom, "web-mercator zoom level (default 18)");
    tile_cmd->add_option("--stretch", tile.stretch,
                         "percentile stretch \"low,high\" or \"off\" (default 2,98)");
    tile_cmd->add_flag("--raw", tile.raw, "also write z/x/y.raw tile payloads");
    tile_cmd->add_option("--nodata", tile.nodata, "sample value treated as no-data (default 0)");
    tile_cmd->add_option("--jobs", tile.jobs, "worker threads (default $CANOPY_DELTA_JOBS or 1)");
    tile_cmd->add_option("--out", tile.out, "output tile directory");

    cli::SplitArgs split;
    auto* split_cmd =
        app.add_subcommand("split", "partition annotated tiles into train/val/test lists");
    split_cmd->add_option("--annotations", split.annotations, "directory of annotation JSON");
    split_cmd->add_option("--seed", split.seed, "shuffle seed (default 0)");
    split_cmd->add_option("--ratios", split.ratios, "train,val,test shares (default 0.7,0.2,0.1)");
    split_cmd->add_flag("--masks", split.masks, "also write combined 1-bit masks per tile");
    split_cmd->add_option("--out", split.out, "output directory");

    cli::IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand(
        "ingest", "georeference per-tile detections into scene instances (GeoJSON)");
    ingest_cmd->add_option("--detections", ingest.detections, "detector results JSON");
    ingest_cmd->add_option("--manifest", ingest.manifest, "tile manifest of the detection run");
    ingest_cmd->add_option("--epoch", ingest.epoch, "acquisition tag, e.g. 2018");
    ingest_cmd->add_option("--dedupe-iou", ingest.dedupe_iou,
                           "cross-tile merge threshold (default 0.5)");
    ingest_cmd->add_option("--epsg", ingest.epsg,
                           "projected CRS for areas/distances (default: UTM of the footprint)");
    ingest_cmd->add_option("--out", ingest.out, "output instances .geojson");

    cli::EvalArgs eval;
    auto* eval_cmd =
        app.add_subcommand("eval", "score detections against annotations (AP/mAP, PR curves)");
    eval_cmd->add_option("--gt", eval.gt_dir, "directory of annotation JSON");
    eval_cmd->add_option("--pred", eval.pred, "detector results JSON");
    eval_cmd->add_option("--iou", eval.iou,
                         "IoU thresholds: \"0.5:0.95\" or a comma list (default 0.5:0.95)");
    eval_cmd->add_flag("--no-masks", eval.no_masks, "box metrics only");
    eval_cmd->add_flag("--all-points", eval.all_points,
                       "all-points AP instead of 101-point interpolation");
    eval_cmd->add_option("--out", eval.out, "summary JSON path (PR CSV lands beside it)");

    cli::MathcheckArgs mathcheck;
    auto* math_cmd = app.add_subcommand(
        "mathcheck", "verify loss gradients and optimizer arithmetic; exit 1 on any failure");
    math_cmd->add_option("--config", mathcheck.config, "training config file to validate");
    math_cmd->add_flag("--allow-custom", mathcheck.allow_custom,
                       "accept hyperparameters outside the published grid");
    math_cmd->add_option("--seed", mathcheck.seed, "sweep seed");
    math_cmd->add_option("--out", mathcheck.out, "optional report directory");

    cli::ChangeArgs change;
    auto* change_cmd =
        app.add_subcommand("change", "match two instance sets and report tree-level change");
    change_cmd->add_option("--before", change.before, "earlier-epoch instances .geojson");
    change_cmd->add_option("--after", change.after, "later-epoch instances .geojson");
    change_cmd->add_option("--regions", change.regions, "regions .geojson for per-region rows");
    change_cmd->add_option("--max-dist", change.max_dist,
                           "centroid match radius in meters (default 2.5)");
    change_cmd->add_option("--strategy", change.strategy, "greedy or optimal (default greedy)");
    change_cmd->add_option("--out", change.out, "report directory");

    cli::SynthArgs synth;
    auto* synth_cmd = app.add_subcommand(
        "synth", "generate a synthetic two-epoch fixture with exact ground truth");
    synth_cmd->add_option("--spec", synth.spec, "fixture spec JSON");
    synth_cmd->add_option("--out", synth.out, "fixture directory");

    cli::PipelineArgs pipeline;
    auto* pipe_cmd =
        app.add_subcommand("pipeline", "run every stage over a config file");
    pipe_cmd->add_option("--config", pipeline.config, "pipeline config (TOML)");
    pipe_cmd->add_option("--jobs", pipeline.jobs,
                         "worker threads (default $CANOPY_DELTA_JOBS or 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error[usage]: %s\n", e.what());
        std::fprintf(stderr, "%s", app.help().c_str());
        return 2;
    }

    try {
        if (tile_cmd->parsed()) return cli::run_tile(tile);
        if (split_cmd->parsed()) return cli::run_split(split);
        if (ingest_cmd->parsed()) return cli::run_ingest(ingest);
        if (eval_cmd->parsed()) return cli::run_eval(eval);
        if (math_cmd->parsed()) return cli::run_mathcheck(mathcheck);
        if (change_cmd->parsed()) return cli::run_change(change);
        if (synth_cmd->parsed()) return cli::run_synth(synth);
        if (pipe_cmd->parsed()) return cli::run_pipeline(pipeline);
    } catch (const canopy::Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", e.category_name(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return 1;
    }

    std::fprintf(stderr, "%s", app.help().c_str());
    return 2;
}
