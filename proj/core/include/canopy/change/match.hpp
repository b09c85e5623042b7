#pragma once

#include <string>
#include <vector>

#include "canopy/detect/geojson.hpp"
#include "canopy/detect/instance.hpp"

namespace canopy::change {

enum class ChangeVerdict { persisted, gained, lost };
const char* verdict_name(ChangeVerdict v);

enum class MatchStrategy { greedy, optimal };
MatchStrategy match_strategy_from_name(const std::string& name);

struct ChangeRecord {
    ChangeVerdict verdict = ChangeVerdict::persisted;
    int earlier_index = -1; // persisted, lost
    int later_index = -1;   // persisted, gained
    std::string earlier_id, later_id;
    double distance_m = 0.0;    // persisted only
    double area_delta_m2 = 0.0; // persisted only: later minus earlier
};

struct MatchOptions {
    double max_dist_m = 2.5;
    MatchStrategy strategy = MatchStrategy::greedy;
};

// One-to-one matching of projected centroids within max_dist_m.  greedy
// claims candidate pairs by ascending distance (ties by earlier id, later
// id); optimal picks the assignment with maximum matches and minimum total
// distance among them.  Unmatched earlier -> lost, unmatched later -> gained.
// Records come out persisted (by earlier index), then lost, then gained.
std::vector<ChangeRecord> match_epochs(const detect::InstanceSet& earlier,
                                       const detect::InstanceSet& later,
                                       const MatchOptions& opts = {});

struct TreeTally {
    int count = 0;
    double area_m2 = 0.0;
};

// Counts instances whose centroid falls inside the region (even-odd rule);
// no region -> everything.
TreeTally count_trees(const detect::InstanceSet& set,
                      const std::vector<geo::LonLat>* region = nullptr);

struct RegionReport {
    std::string region_id; // "scene" for the whole-scene row
    int count_earlier = 0;
    int count_later = 0;
    int persisted = 0;
    int gained = 0;
    int lost = 0;
    double area_earlier_m2 = 0.0;
    double area_later_m2 = 0.0;
    int net_count_delta() const { return count_later - count_earlier; }
    double net_area_delta_m2() const { return area_later_m2 - area_earlier_m2; }
};

struct RegionReportResult {
    std::vector<RegionReport> rows; // scene row first, then one per region
    std::vector<std::string> warnings;
};

// Attributes each record to the first region containing its centroid
// (later-epoch centroid for persisted and gained, earlier for lost).
// Per-epoch counts and areas are derived from the attributed records so the
// persisted+lost / persisted+gained identities hold per region.
RegionReportResult region_report(const std::vector<ChangeRecord>& records,
                                 const detect::InstanceSet& earlier,
                                 const detect::InstanceSet& later,
                                 const std::vector<detect::RegionDef>& regions);

} // namespace canopy::change
