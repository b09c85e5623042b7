#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "canopy/geo/types.hpp"

namespace canopy::synth {

struct EpochEditPlan {
    double remove_fraction = 0.0;
    double add_fraction = 0.0;
    double jitter_fraction = 0.0;
    double jitter_m = 0.0; // maximum centroid displacement (uniform in a disk)
};

struct DetectorNoise {
    double miss_rate = 0.0;
    double fp_rate = 0.0;           // expected false positives per true tree
    double boundary_noise_px = 0.0; // gaussian sigma added to outline vertices
    double score_min = 0.6;
    double score_max = 1.0;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    geo::LonLatBox extent;
    double gsd_m = 0.5;
    int tree_count = 50;
    double crown_radius_min_m = 1.5;
    double crown_radius_max_m = 4.0;
    std::string earlier_epoch = "2011";
    std::string later_epoch = "2018";
    EpochEditPlan edits;
    DetectorNoise detector;
    double min_spacing_m = 0.0; // 0 -> derived: 2*max radius + 1
    double seam_margin_m = 2.0; // extra clearance kept between a crown and tile edges
    int zoom = 18;
    int region_count = 5;

    double spacing() const {
        return min_spacing_m > 0.0 ? min_spacing_m : 2.0 * crown_radius_max_m + 1.0;
    }
    void validate() const; // ConfigError on any bad field
};

SynthSpec load_synth_spec(const std::filesystem::path& path);
void save_synth_spec(const SynthSpec& spec, const std::filesystem::path& path);

} // namespace canopy::synth
