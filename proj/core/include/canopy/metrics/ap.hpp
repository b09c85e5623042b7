#pragma once

#include <cstdint>
#include <vector>

namespace canopy::metrics {

struct PRPoint {
    double score = 0.0;
    double recall = 0.0;
    double precision = 0.0;
};

struct PRCurve {
    double iou_threshold = 0.5;
    std::int64_t n_gt = 0;
    std::vector<PRPoint> points; // swept over descending score cutoffs
};

enum class ApInterpolation {
    points101,  // precision envelope sampled at recall 0.00, 0.01, ..., 1.00
    all_points, // exact area under the interpolated envelope
};

// One (is_tp, score) flag per prediction, already in the global sweep order
// (descending score, stable). Builds the prefix precision/recall staircase.
PRCurve pr_curve_from_flags(const std::vector<char>& is_tp,
                            const std::vector<double>& scores, std::int64_t n_gt,
                            double iou_threshold);

// Average precision of one curve; empty ground truth is a domain error.
double average_precision(const PRCurve& curve,
                         ApInterpolation interp = ApInterpolation::points101);

// Arithmetic mean over per-class APs; empty input is a domain error.
double mean_average_precision(const std::vector<double>& per_class_ap);

// The 10 thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> iou_threshold_range();

} // namespace canopy::metrics
