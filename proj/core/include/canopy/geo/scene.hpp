#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "canopy/geo/geotransform.hpp"
#include "canopy/geo/types.hpp"

namespace canopy::geo {

enum class SampleType { u8, u16 };

inline int sample_size(SampleType t) { return t == SampleType::u8 ? 1 : 2; }
const char* sample_type_name(SampleType t);
SampleType sample_type_from_name(const std::string& name);

struct SceneDescriptor {
    int width = 0;
    int height = 0;
    int bands = 0;
    SampleType dtype = SampleType::u16;
    GeoTransform transform;
    int epsg = 0;
    std::string date; // ISO-8601, e.g. "2018-03-21"
    double gsd_m = 0.0;

    void validate() const; // throws ConfigError on any bad field
    LonLatBox footprint_lonlat() const;
};

// Sidecar lives next to the payload: "<name>.raw" + "<name>.scene.json".
std::filesystem::path sidecar_path_for(const std::filesystem::path& raw_path);

SceneDescriptor load_scene_descriptor(const std::filesystem::path& json_path);
void save_scene_descriptor(const SceneDescriptor& d, const std::filesystem::path& json_path);

// Whole-scene pixel payload. Samples are held widened to u16 in memory and
// written back in the descriptor's dtype. The .raw layout is band-sequential
// (full band 0 row-major, then band 1, ...), little-endian for u16.
class SceneRaster {
public:
    SceneDescriptor desc;
    std::vector<std::uint16_t> samples;

    std::uint16_t at(int band, int row, int col) const {
        return samples[idx(band, row, col)];
    }
    std::uint16_t& at(int band, int row, int col) { return samples[idx(band, row, col)]; }

    static SceneRaster load(const std::filesystem::path& raw_path);
    void save(const std::filesystem::path& raw_path) const;

private:
    std::size_t idx(int band, int row, int col) const {
        return (static_cast<std::size_t>(band) * desc.height + row) * desc.width + col;
    }
};

} // namespace canopy::geo
