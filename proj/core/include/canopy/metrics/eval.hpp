#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "canopy/metrics/ap.hpp"
#include "canopy/metrics/iou.hpp"
#include "canopy/metrics/matching.hpp"
#include "canopy/raster/grid.hpp"

namespace canopy::metrics {

struct EvalGtInstance {
    std::string label;
    Box box;
    raster::Grid<std::uint8_t> mask; // may be empty when masks are unavailable
};

struct EvalPredInstance {
    std::string label;
    double score = 0.0;
    Box box;
    raster::Grid<std::uint8_t> mask;
};

struct EvalImage {
    std::string id; // e.g. "18/183834/113859"
    std::vector<EvalGtInstance> gt;
    std::vector<EvalPredInstance> pred;
};

struct EvalOptions {
    std::vector<double> thresholds;             // default: 0.50..0.95 step 0.05
    ApInterpolation interp = ApInterpolation::points101;
    bool with_masks = true;
};

struct ThresholdEval {
    double threshold = 0.0;
    double ap = 0.0;
    PRCurve curve;
};

struct ClassEval {
    std::string label;
    std::int64_t n_gt = 0;
    std::int64_t n_pred = 0;
    std::vector<ThresholdEval> box;
    std::vector<ThresholdEval> mask; // empty when masks unavailable
};

struct EvalSummary {
    std::vector<double> thresholds;
    std::vector<ClassEval> classes;

    // Eq-3 means across classes with defined AP.
    double map_box_50 = 0.0;
    double map_box_range = 0.0;      // mean over the full threshold set (headline)
    double map_box_pair = 0.0;       // mean over {0.50, 0.95} only
    double map_mask_50 = 0.0;
    double map_mask_range = 0.0;
    double map_mask_pair = 0.0;
    bool has_masks = false;
    bool has_pair = false; // both 0.50 and 0.95 were in the threshold set

    // TP / |GT| over all classes at threshold 0.50, box IoU, no score cutoff.
    // Reported as "detection_rate_50": an explicit stand-in for informal
    // "detection accuracy" figures, not a claim about any of them.
    double detection_rate_50 = 0.0;

    std::int64_t total_gt = 0;
    std::int64_t total_pred = 0;
    bool precision_undefined_seen = false; // some cutoff had TP+FP == 0
    bool recall_undefined_seen = false;    // some class/image had no ground truth
};

EvalSummary evaluate_dataset(const std::vector<EvalImage>& images,
                             const EvalOptions& options);

void write_eval_summary_json(const EvalSummary& summary,
                             const std::filesystem::path& path);
// One CSV over all curves: metric,label,iou_threshold,score,recall,precision.
void write_pr_curves_csv(const EvalSummary& summary,
                         const std::filesystem::path& path);

} // namespace canopy::metrics
