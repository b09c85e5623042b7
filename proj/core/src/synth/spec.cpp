#include "canopy/synth/spec.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "canopy/geo/mercator.hpp"
#include "canopy/util/error.hpp"

namespace canopy::synth {

using nlohmann::json;

namespace {

void require_fraction(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(name) + " must be in [0, 1]");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            throw ConfigError("unknown key \"" + key + "\" in " + where);
    }
}

} // namespace

void SynthSpec::validate() const {
    if (extent.is_degenerate()) throw ConfigError("extent is degenerate");
    if (std::abs(extent.south) > geo::kWebMercatorLatLimit ||
        std::abs(extent.north) > geo::kWebMercatorLatLimit)
        throw ConfigError("extent exceeds the web-mercator latitude limit");
    if (!(gsd_m > 0.0)) throw ConfigError("gsd_m must be positive");
    if (tree_count < 0) throw ConfigError("tree_count must be non-negative");
    if (!(crown_radius_min_m > 0.0) || crown_radius_max_m < crown_radius_min_m)
        throw ConfigError("crown radius range must satisfy 0 < min <= max");
    require_fraction(edits.remove_fraction, "edits.remove_fraction");
    require_fraction(edits.add_fraction, "edits.add_fraction");
    require_fraction(edits.jitter_fraction, "edits.jitter_fraction");
    if (edits.jitter_m < 0.0) throw ConfigError("edits.jitter_m must be non-negative");
    require_fraction(detector.miss_rate, "detector.miss_rate");
    if (detector.fp_rate < 0.0) throw ConfigError("detector.fp_rate must be non-negative");
    if (detector.boundary_noise_px < 0.0)
        throw ConfigError("detector.boundary_noise_px must be non-negative");
    if (!(detector.score_min >= 0.0 && detector.score_max <= 1.0 &&
          detector.score_min <= detector.score_max))
        throw ConfigError("detector score range must satisfy 0 <= min <= max <= 1");
    if (min_spacing_m < 0.0) throw ConfigError("min_spacing_m must be non-negative");
    if (seam_margin_m < 0.0) throw ConfigError("seam_margin_m must be non-negative");
    if (zoom < 0 || zoom > 22) throw ConfigError("zoom must be in [0, 22]");
    if (region_count < 0) throw ConfigError("region_count must be non-negative");
    if (earlier_epoch.empty() || later_epoch.empty())
        throw ConfigError("epoch names must be non-empty");
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ParseError(path.string() + ": expected a JSON object");

    reject_unknown_keys(doc,
                        {"seed", "extent", "gsd_m", "tree_count", "crown_radius_m", "epochs",
                         "edits", "detector", "min_spacing_m", "seam_margin_m", "zoom",
                         "regions"},
                        path.string());

    SynthSpec spec;
    try {
        spec.seed = doc.value("seed", std::uint64_t{1});
        if (!doc.contains("extent")) throw ParseError("missing \"extent\"");
        const json& e = doc["extent"];
        reject_unknown_keys(e, {"west", "south", "east", "north"}, "extent");
        spec.extent = {e.at("west").get<double>(), e.at("south").get<double>(),
                       e.at("east").get<double>(), e.at("north").get<double>()};
        spec.gsd_m = doc.value("gsd_m", spec.gsd_m);
        spec.tree_count = doc.value("tree_count", spec.tree_count);
        if (doc.contains("crown_radius_m")) {
            const json& r = doc["crown_radius_m"];
            if (!r.is_array() || r.size() != 2)
                throw ParseError("\"crown_radius_m\" must be [min, max]");
            spec.crown_radius_min_m = r[0].get<double>();
            spec.crown_radius_max_m = r[1].get<double>();
        }
        if (doc.contains("epochs")) {
            const json& ep = doc["epochs"];
            reject_unknown_keys(ep, {"earlier", "later"}, "epochs");
            spec.earlier_epoch = ep.value("earlier", spec.earlier_epoch);
            spec.later_epoch = ep.value("later", spec.later_epoch);
        }
        if (doc.contains("edits")) {
            const json& ed = doc["edits"];
            reject_unknown_keys(
                ed, {"remove_fraction", "add_fraction", "jitter_fraction", "jitter_m"}, "edits");
            spec.edits.remove_fraction = ed.value("remove_fraction", 0.0);
            spec.edits.add_fraction = ed.value("add_fraction", 0.0);
            spec.edits.jitter_fraction = ed.value("jitter_fraction", 0.0);
            spec.edits.jitter_m = ed.value("jitter_m", 0.0);
        }
        if (doc.contains("detector")) {
            const json& det = doc["detector"];
            reject_unknown_keys(
                det, {"miss_rate", "fp_rate", "boundary_noise_px", "score_min", "score_max"},
                "detector");
            spec.detector.miss_rate = det.value("miss_rate", 0.0);
            spec.detector.fp_rate = det.value("fp_rate", 0.0);
            spec.detector.boundary_noise_px = det.value("boundary_noise_px", 0.0);
            spec.detector.score_min = det.value("score_min", spec.detector.score_min);
            spec.detector.score_max = det.value("score_max", spec.detector.score_max);
        }
        spec.min_spacing_m = doc.value("min_spacing_m", spec.min_spacing_m);
        spec.seam_margin_m = doc.value("seam_margin_m", spec.seam_margin_m);
        spec.zoom = doc.value("zoom", spec.zoom);
        spec.region_count = doc.value("regions", spec.region_count);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    spec.validate();
    return spec;
}

void save_synth_spec(const SynthSpec& spec, const std::filesystem::path& path) {
    json doc;
    doc["seed"] = spec.seed;
    doc["extent"] = {{"west", spec.extent.west},
                     {"south", spec.extent.south},
                     {"east", spec.extent.east},
                     {"north", spec.extent.north}};
    doc["gsd_m"] = spec.gsd_m;
    doc["tree_count"] = spec.tree_count;
    doc["crown_radius_m"] = {spec.crown_radius_min_m, spec.crown_radius_max_m};
    doc["epochs"] = {{"earlier", spec.earlier_epoch}, {"later", spec.later_epoch}};
    doc["edits"] = {{"remove_fraction", spec.edits.remove_fraction},
                    {"add_fraction", spec.edits.add_fraction},
                    {"jitter_fraction", spec.edits.jitter_fraction},
                    {"jitter_m", spec.edits.jitter_m}};
    doc["detector"] = {{"miss_rate", spec.detector.miss_rate},
                       {"fp_rate", spec.detector.fp_rate},
                       {"boundary_noise_px", spec.detector.boundary_noise_px},
                       {"score_min", spec.detector.score_min},
                       {"score_max", spec.detector.score_max}};
    doc["min_spacing_m"] = spec.min_spacing_m;
    doc["seam_margin_m"] = spec.seam_margin_m;
    doc["zoom"] = spec.zoom;
    doc["regions"] = spec.region_count;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write synth spec: " + path.string());
    out << doc.dump(2) << "\n";
}

} // namespace canopy::synth
