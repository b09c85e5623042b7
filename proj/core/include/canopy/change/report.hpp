#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "canopy/change/match.hpp"

namespace canopy::change {

struct ChangeRunMeta {
    std::string earlier_epoch, later_epoch;
    std::string strategy;
    double max_dist_m = 0.0;
};

// FeatureCollection of instance outlines tagged with their verdict (the
// later-epoch outline for persisted/gained, earlier for lost).
void write_changes_geojson(const std::vector<ChangeRecord>& records,
                           const detect::InstanceSet& earlier,
                           const detect::InstanceSet& later,
                           const std::filesystem::path& path);

// One row per region, scene row first.
void write_region_report_csv(const std::vector<RegionReport>& rows,
                             const std::filesystem::path& path);

void write_change_summary_md(const std::vector<RegionReport>& rows,
                             const std::vector<std::string>& warnings,
                             const ChangeRunMeta& meta,
                             const std::filesystem::path& path);

} // namespace canopy::change
