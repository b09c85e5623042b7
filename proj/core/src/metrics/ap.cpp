#include "canopy/metrics/ap.hpp"

#include <algorithm>

#include "canopy/util/error.hpp"

namespace canopy::metrics {

PRCurve pr_curve_from_flags(const std::vector<char>& is_tp,
                            const std::vector<double>& scores, std::int64_t n_gt,
                            double iou_threshold) {
    if (is_tp.size() != scores.size())
        throw DomainError("flag and score lists must have equal length");
    PRCurve curve;
    curve.iou_threshold = iou_threshold;
    curve.n_gt = n_gt;
    curve.points.reserve(is_tp.size());
    std::int64_t tp = 0;
    for (std::size_t k = 0; k < is_tp.size(); ++k) {
        tp += is_tp[k] != 0;
        PRPoint pt;
        pt.score = scores[k];
        pt.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
        pt.recall = n_gt == 0 ? 0.0
                              : static_cast<double>(tp) / static_cast<double>(n_gt);
        curve.points.push_back(pt);
    }
    return curve;
}

double average_precision(const PRCurve& curve, ApInterpolation interp) {
    if (curve.n_gt == 0)
        throw DomainError("average precision undefined for empty ground truth");
    const auto& pts = curve.points;
    if (pts.empty()) return 0.0;

    // envelope: max precision over all points with recall >= r, built
    // right-to-left
    std::vector<double> env_precision(pts.size());
    double running = 0.0;
    for (std::size_t i = pts.size(); i-- > 0;) {
        running = std::max(running, pts[i].precision);
        env_precision[i] = running;
    }

    if (interp == ApInterpolation::points101) {
        double sum = 0.0;
        for (int k = 0; k <= 100; ++k) {
            const double r = static_cast<double>(k) / 100.0;
            // first point with recall >= r carries the envelope value
            double p = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (pts[i].recall >= r) {
                    p = env_precision[i];
                    break;
                }
            }
            sum += p;
        }
        return sum / 101.0;
    }

    // all-points: sum of recall increments times the envelope at each step
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].recall > prev_recall) {
            ap += (pts[i].recall - prev_recall) * env_precision[i];
            prev_recall = pts[i].recall;
        }
    }
    return ap;
}

double mean_average_precision(const std::vector<double>& per_class_ap) {
    if (per_class_ap.empty())
        throw DomainError("mean average precision needs at least one class AP");
    double sum = 0.0;
    for (double ap : per_class_ap) sum += ap;
    return sum / static_cast<double>(per_class_ap.size());
}

std::vector<double> iou_threshold_range() {
    std::vector<double> t;
    // (50 + 5k)/100 rather than 0.50 + 0.05*k: the additive form drifts off
    // the representable nearest doubles (0.8500000000000001).
    for (int k = 0; k < 10; ++k) t.push_back(static_cast<double>(50 + 5 * k) / 100.0);
    return t;
}

} // namespace canopy::metrics
