#include "canopy/metrics/matching.hpp"

#include <algorithm>
#include <numeric>

#include "canopy/util/error.hpp"

namespace canopy::metrics {

double precision(const MatchCounts& c, bool* undefined) {
    const std::int64_t den = c.tp + c.fp;
    if (undefined) *undefined = den == 0;
    return den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(den);
}

double recall(const MatchCounts& c, bool* undefined) {
    const std::int64_t den = c.tp + c.fn;
    if (undefined) *undefined = den == 0;
    return den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(den);
}

MatchResult match_instances(const std::vector<double>& scores,
                            const raster::Grid<double>& iou, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw DomainError("match threshold must be in (0, 1]");
    const int n_pred = static_cast<int>(scores.size());
    const int n_gt = iou.width();
    if (n_pred > 0 && iou.height() != n_pred)
        throw DomainError("iou matrix rows must equal prediction count");

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });

    MatchResult result;
    result.pred_to_gt.assign(scores.size(), -1);
    std::vector<char> gt_taken(static_cast<std::size_t>(n_gt), 0);

    for (int p : order) {
        int best = -1;
        double best_iou = 0.0;
        for (int g = 0; g < n_gt; ++g) {
            if (gt_taken[g]) continue;
            const double v = iou.at(p, g);
            if (v >= threshold && v > best_iou) {
                best_iou = v;
                best = g;
            }
        }
        if (best >= 0) {
            gt_taken[best] = 1;
            result.pred_to_gt[p] = best;
            ++result.counts.tp;
        }
    }
    result.counts.fp = n_pred - result.counts.tp;
    result.counts.fn = n_gt - result.counts.tp;
    return result;
}

} // namespace canopy::metrics
