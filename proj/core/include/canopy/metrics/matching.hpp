#pragma once

#include <cstdint>
#include <vector>

#include "canopy/raster/grid.hpp"

namespace canopy::metrics {

struct MatchCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
};

// Eq-style ratios; 0/0 yields 0 and sets *undefined when provided.
double precision(const MatchCounts& c, bool* undefined = nullptr);
double recall(const MatchCounts& c, bool* undefined = nullptr);

struct MatchResult {
    std::vector<int> pred_to_gt; // per prediction (input order), -1 = unmatched
    MatchCounts counts;
};

// Greedy one-to-one matching: predictions in descending score (ties keep
// input order) each claim the still-unclaimed ground truth with the highest
// IoU >= threshold; GT ties go to the lowest index. `iou` is the
// precomputed n_pred x n_gt matrix (rows = predictions).
MatchResult match_instances(const std::vector<double>& scores,
                            const raster::Grid<double>& iou, double threshold);

} // namespace canopy::metrics
