#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "canopy/annot/labelme.hpp"
#include "canopy/annot/mask.hpp"
#include "canopy/detect/detection.hpp"
#include "canopy/geo/polygon.hpp"
#include "canopy/metrics/eval.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

// "18/183834/113859.png" -> "18/183834/113859", matching the detections'
// tile ids.
std::string strip_extension(const std::string& image_id) {
    auto slash = image_id.rfind('/');
    auto dot = image_id.rfind('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return image_id;
    return image_id.substr(0, dot);
}

metrics::Box box_of_polygon(const std::vector<geo::Vec2>& points) {
    geo::Bounds b = geo::polygon_bounds(points);
    return {b.minx, b.miny, b.maxx - b.minx, b.maxy - b.miny};
}

} // namespace

EvalStageResult stage_eval(const fs::path& gt_dir, const fs::path& pred_file,
                           const std::vector<double>& thresholds, bool with_masks,
                           bool all_points, const fs::path& out_file) {
    std::map<std::string, metrics::EvalImage> images;

    // Ground truth: keep every label so non-tree classes also get scored.
    annot::AnnotationParseOptions gt_options;
    gt_options.label_filter.clear();
    for (const auto& file : annot::list_annotation_files(gt_dir)) {
        annot::AnnotationParseResult parsed = annot::parse_annotation_file(file, gt_options);
        for (const auto& rej : parsed.rejected)
            std::fprintf(stderr, "warning: %s: shape %d rejected: %s\n",
                         file.filename().string().c_str(), rej.shape_index,
                         rej.reason.c_str());
        for (const auto& ann : parsed.annotations) {
            std::string id = strip_extension(ann.image_id);
            metrics::EvalImage& image = images[id];
            image.id = id;
            metrics::EvalGtInstance gt;
            gt.label = ann.label;
            gt.box = box_of_polygon(ann.points);
            if (with_masks)
                gt.mask = annot::polygon_to_mask(ann.points, 512, 512, ann.image_id).grid;
            image.gt.push_back(std::move(gt));
        }
    }

    detect::DetectionParseResult dets = detect::parse_detections(pred_file);
    for (const auto& rej : dets.rejected)
        std::fprintf(stderr, "warning: %s: record %d rejected: %s\n",
                     pred_file.filename().string().c_str(), rej.index, rej.reason.c_str());
    for (const auto& d : dets.detections) {
        metrics::EvalImage& image = images[d.tile_str];
        image.id = d.tile_str;
        metrics::EvalPredInstance pred;
        pred.label = d.label;
        pred.score = d.score;
        pred.box = d.bbox;
        if (with_masks) pred.mask = annot::fill_polygon(d.polygon, 512, 512);
        image.pred.push_back(std::move(pred));
    }

    std::vector<metrics::EvalImage> list;
    list.reserve(images.size());
    for (auto& [id, image] : images) list.push_back(std::move(image));

    metrics::EvalOptions options;
    options.thresholds = thresholds;
    options.interp = all_points ? metrics::ApInterpolation::all_points
                                : metrics::ApInterpolation::points101;
    options.with_masks = with_masks;
    metrics::EvalSummary summary = metrics::evaluate_dataset(list, options);

    metrics::write_eval_summary_json(summary, out_file);
    fs::path csv = out_file;
    csv.replace_filename(out_file.stem().string() + "_pr.csv");
    metrics::write_pr_curves_csv(summary, csv);

    return {summary.map_box_range, summary.map_mask_range, summary.map_box_50,
            summary.detection_rate_50, summary.has_masks, list.size()};
}

int run_eval(const EvalArgs& a) {
    require_flag(a.gt_dir, "--gt");
    require_flag(a.pred, "--pred");
    require_flag(a.out, "--out");
    std::vector<double> thresholds = parse_iou_spec(a.iou);

    RunContext run("eval", a.out, /*dir_mode=*/false);
    run.param("iou", a.iou);
    run.param("masks", !a.no_masks);
    run.param("interpolation", a.all_points ? "all-points" : "101-point");
    run.input_dir("gt", a.gt_dir);
    run.input_file("pred", a.pred);

    EvalStageResult res = stage_eval(a.gt_dir, a.pred, thresholds, !a.no_masks, a.all_points,
                                     run.stage() / fs::path(a.out).filename());
    run.note("images", res.images);
    run.finalize();

    std::printf("images evaluated: %zu\n", res.images);
    std::printf("mAP over %zu IoU threshold(s): box=%.4f", thresholds.size(), res.map_box);
    if (res.with_masks) std::printf(" mask=%.4f", res.map_mask);
    std::printf("\n");
    if (std::find(thresholds.begin(), thresholds.end(), 0.5) != thresholds.end())
        std::printf("AP@0.50 box=%.4f  detection_rate@0.50=%.4f\n", res.ap50_box,
                    res.detection_rate_50);
    return 0;
}

} // namespace canopy::cli
