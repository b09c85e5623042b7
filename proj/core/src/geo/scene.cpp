#include "canopy/geo/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "canopy/geo/projection.hpp"
#include "canopy/util/error.hpp"

namespace canopy::geo {

using nlohmann::json;

const char* sample_type_name(SampleType t) { return t == SampleType::u8 ? "u8" : "u16"; }

SampleType sample_type_from_name(const std::string& name) {
    if (name == "u8") return SampleType::u8;
    if (name == "u16") return SampleType::u16;
    throw ConfigError("dtype must be \"u8\" or \"u16\", got \"" + name + "\"");
}

void SceneDescriptor::validate() const {
    if (width < 1 || height < 1)
        throw ConfigError("scene dimensions must be >= 1, got " + std::to_string(width) +
                          "x" + std::to_string(height));
    if (bands < 1) throw ConfigError("scene must have >= 1 band");
    if (!(gsd_m > 0.0)) throw ConfigError("gsd_m must be > 0");
    if (!epsg_supported(epsg))
        throw ConfigError("scene epsg " + std::to_string(epsg) + " not supported");
    if (transform.pixel_width() <= 0.0)
        throw ConfigError("geotransform pixel width must be > 0");
    if (transform.pixel_height() == 0.0)
        throw ConfigError("geotransform pixel height must be nonzero");
    const LonLatBox box = footprint_lonlat();
    if (box.is_degenerate())
        throw ConfigError("scene footprint is degenerate or non-finite");
}

LonLatBox SceneDescriptor::footprint_lonlat() const {
    const double w = width, h = height;
    const Vec2 corners[4] = {
        transform.pixel_to_geo(0.0, 0.0),
        transform.pixel_to_geo(w, 0.0),
        transform.pixel_to_geo(0.0, h),
        transform.pixel_to_geo(w, h),
    };
    LonLatBox box;
    box.west = box.south = std::numeric_limits<double>::infinity();
    box.east = box.north = -std::numeric_limits<double>::infinity();
    for (const Vec2& c : corners) {
        const LonLat p = projected_to_lonlat(epsg, c);
        box.west = std::min(box.west, p.lon);
        box.east = std::max(box.east, p.lon);
        box.south = std::min(box.south, p.lat);
        box.north = std::max(box.north, p.lat);
    }
    return box;
}

std::filesystem::path sidecar_path_for(const std::filesystem::path& raw_path) {
    std::filesystem::path p = raw_path;
    p.replace_extension(); // drop .raw
    p += ".scene.json";
    return p;
}

SceneDescriptor load_scene_descriptor(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw IoError("cannot open scene sidecar: " + json_path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("scene sidecar " + json_path.string() + ": " + e.what());
    }

    const char* required[] = {"width", "height", "bands", "dtype",
                              "geotransform", "epsg", "date", "gsd_m"};
    for (const char* key : required)
        if (!j.contains(key))
            throw ConfigError("scene sidecar missing field \"" + std::string(key) + "\"");

    SceneDescriptor d;
    try {
        d.width = j.at("width").get<int>();
        d.height = j.at("height").get<int>();
        d.bands = j.at("bands").get<int>();
        d.dtype = sample_type_from_name(j.at("dtype").get<std::string>());
        const auto gt = j.at("geotransform").get<std::vector<double>>();
        if (gt.size() != 6)
            throw ConfigError("geotransform must have exactly 6 numbers, got " +
                              std::to_string(gt.size()));
        d.transform = GeoTransform({gt[0], gt[1], gt[2], gt[3], gt[4], gt[5]});
        d.epsg = j.at("epsg").get<int>();
        d.date = j.at("date").get<std::string>();
        d.gsd_m = j.at("gsd_m").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError("scene sidecar " + json_path.string() + ": " + e.what());
    }
    d.validate();
    return d;
}

void save_scene_descriptor(const SceneDescriptor& d, const std::filesystem::path& json_path) {
    d.validate();
    json j;
    j["width"] = d.width;
    j["height"] = d.height;
    j["bands"] = d.bands;
    j["dtype"] = sample_type_name(d.dtype);
    j["geotransform"] = d.transform.coeffs();
    j["epsg"] = d.epsg;
    j["date"] = d.date;
    j["gsd_m"] = d.gsd_m;
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot write scene sidecar: " + json_path.string());
    out << j.dump(2) << "\n";
}

SceneRaster SceneRaster::load(const std::filesystem::path& raw_path) {
    SceneRaster r;
    r.desc = load_scene_descriptor(sidecar_path_for(raw_path));

    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw IoError("cannot open scene raster: " + raw_path.string());
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);

    const std::size_t count = static_cast<std::size_t>(r.desc.width) * r.desc.height *
                              r.desc.bands;
    const std::size_t expected = count * sample_size(r.desc.dtype);
    if (file_size != expected)
        throw IoError("scene raster " + raw_path.string() + ": expected " +
                      std::to_string(expected) + " bytes, found " +
                      std::to_string(file_size));

    r.samples.resize(count);
    if (r.desc.dtype == SampleType::u8) {
        std::vector<std::uint8_t> buf(count);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
        std::copy(buf.begin(), buf.end(), r.samples.begin());
    } else {
        std::vector<unsigned char> buf(expected);
        in.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(expected));
        for (std::size_t i = 0; i < count; ++i)
            r.samples[i] = static_cast<std::uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
    }
    if (!in) throw IoError("short read on scene raster: " + raw_path.string());
    return r;
}

void SceneRaster::save(const std::filesystem::path& raw_path) const {
    desc.validate();
    const std::size_t count =
        static_cast<std::size_t>(desc.width) * desc.height * desc.bands;
    if (samples.size() != count)
        throw DomainError("sample buffer size does not match descriptor");

    std::ofstream out(raw_path, std::ios::binary);
    if (!out) throw IoError("cannot write scene raster: " + raw_path.string());
    if (desc.dtype == SampleType::u8) {
        std::vector<std::uint8_t> buf(count);
        for (std::size_t i = 0; i < count; ++i)
            buf[i] = static_cast<std::uint8_t>(std::min<std::uint16_t>(samples[i], 255));
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(count));
    } else {
        std::vector<unsigned char> buf(count * 2);
        for (std::size_t i = 0; i < count; ++i) {
            buf[2 * i] = static_cast<unsigned char>(samples[i] & 0xff);
            buf[2 * i + 1] = static_cast<unsigned char>(samples[i] >> 8);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("write failure on scene raster: " + raw_path.string());
    save_scene_descriptor(desc, sidecar_path_for(raw_path));
}

} // namespace canopy::geo
