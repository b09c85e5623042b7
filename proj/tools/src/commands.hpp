#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace canopy::cli {

inline constexpr const char* kToolName = "canopy-delta";
inline constexpr const char* kToolVersion = "0.1.0";

// Resolve worker count: explicit flag beats CANOPY_DELTA_JOBS beats 1.
int resolve_jobs(int flag_value);

// Throws ConfigError naming the flag when a required option was not given.
void require_flag(const std::string& value, const char* flag);

// Runs a subcommand's output through a staging directory so interrupted runs
// never leave a partial result at the target path. Layout:
//   <target>.staging/   while the run is in flight
//   <target>            after finalize() (staged children moved in)
//   <target>.failed/    when the run throws before finalize()
//
// finalize() also drops two sidecar files next to the outputs:
//   run_manifest.json   deterministic: tool version, subcommand, parameters,
//                       input content hashes, notes (no timestamps, no --out,
//                       no --jobs)
//   run_timings.json    wall-clock start/finish, the only non-reproducible file
// In file mode (target is a single output file) the sidecars are named
// "<file>.run_manifest.json" / "<file>.run_timings.json" instead.
class RunContext {
public:
    RunContext(std::string subcommand, std::filesystem::path target, bool dir_mode);
    ~RunContext();

    RunContext(const RunContext&) = delete;
    RunContext& operator=(const RunContext&) = delete;

    // Directory the command should write into while staging.
    const std::filesystem::path& stage() const { return stage_; }
    const std::filesystem::path& target() const { return target_; }

    void param(const std::string& key, const std::string& value);
    void param(const std::string& key, const char* value) { param(key, std::string(value)); }
    void param(const std::string& key, std::int64_t value);
    void param(const std::string& key, int value) { param(key, static_cast<std::int64_t>(value)); }
    void param(const std::string& key, double value);
    void param(const std::string& key, bool value);

    // Fingerprint an input file (or every regular file under a directory).
    void input_file(const std::string& name, const std::filesystem::path& path);
    void input_dir(const std::string& name, const std::filesystem::path& path);

    void note(const std::string& key, const nlohmann::json& value);

    void finalize();

private:
    std::string subcommand_;
    std::filesystem::path target_;
    std::filesystem::path stage_;
    bool dir_mode_;
    bool finalized_ = false;
    std::chrono::system_clock::time_point started_;
    nlohmann::json params_ = nlohmann::json::object();
    nlohmann::json inputs_ = nlohmann::json::object();
    nlohmann::json notes_ = nlohmann::json::object();
};

// --- argument bundles -------------------------------------------------------

struct TileArgs {
    std::string scene;
    std::string out;
    int zoom = 18;
    std::string stretch = "2,98"; // "off" disables
    bool raw = false;
    int nodata = 0;
    int jobs = 0;
};

struct SplitArgs {
    std::string annotations;
    std::string out;
    std::uint64_t seed = 0;
    std::string ratios = "0.7,0.2,0.1";
    bool masks = false;
};

struct IngestArgs {
    std::string detections;
    std::string manifest;
    std::string epoch;
    std::string out;
    double dedupe_iou = 0.5;
    int epsg = 0; // 0 = derive UTM zone from the manifest footprint
};

struct EvalArgs {
    std::string gt_dir;
    std::string pred;
    std::string out;
    std::string iou = "0.5:0.95";
    bool no_masks = false;
    bool all_points = false; // all-points AP instead of 101-point interpolation
};

struct MathcheckArgs {
    std::string out;    // optional report directory
    std::string config; // optional training config to validate
    bool allow_custom = false;
    std::uint64_t seed = 20260815;
};

struct ChangeArgs {
    std::string before;
    std::string after;
    std::string regions;
    std::string out;
    double max_dist = 2.5;
    std::string strategy = "greedy";
};

struct SynthArgs {
    std::string spec;
    std::string out;
};

struct PipelineArgs {
    std::string config;
    int jobs = 0;
};

int run_tile(const TileArgs& a);
int run_split(const SplitArgs& a);
int run_ingest(const IngestArgs& a);
int run_eval(const EvalArgs& a);
int run_mathcheck(const MathcheckArgs& a);
int run_change(const ChangeArgs& a);
int run_synth(const SynthArgs& a);
int run_pipeline(const PipelineArgs& a);

// --- stage helpers shared by the subcommands and the pipeline driver --------

struct TileStageResult {
    std::size_t tiles = 0;
    int zoom = 0;
};
TileStageResult stage_tile(const std::filesystem::path& scene_raw, const TileArgs& a,
                           const std::filesystem::path& out_dir);

struct SplitStageResult {
    std::size_t train = 0, val = 0, test = 0;
};
SplitStageResult stage_split(const std::filesystem::path& annotations_dir, std::uint64_t seed,
                             const std::array<double, 3>& ratios, bool masks,
                             const std::filesystem::path& out_dir);

struct IngestStageResult {
    std::size_t raw_detections = 0;    // per-tile detections before dedupe
    std::size_t scene_instances = 0;   // after cross-tile dedupe
    std::size_t rejected = 0;
    int epsg = 0;
};
IngestStageResult stage_ingest(const std::filesystem::path& detections_file,
                               const std::filesystem::path& manifest_file,
                               const std::string& epoch, int epsg, double dedupe_iou,
                               const std::filesystem::path& out_file);

struct EvalStageResult {
    double map_box = 0.0;
    double map_mask = 0.0;
    double ap50_box = 0.0;
    double detection_rate_50 = 0.0;
    bool with_masks = true;
    std::size_t images = 0;
};
EvalStageResult stage_eval(const std::filesystem::path& gt_dir,
                           const std::filesystem::path& pred_file,
                           const std::vector<double>& thresholds, bool with_masks,
                           bool all_points, const std::filesystem::path& out_file);

struct ChangeStageResult {
    std::size_t persisted = 0, gained = 0, lost = 0;
};
ChangeStageResult stage_change(const std::filesystem::path& before_file,
                               const std::filesystem::path& after_file,
                               const std::optional<std::filesystem::path>& regions_file,
                               double max_dist, const std::string& strategy,
                               const std::filesystem::path& out_dir);

std::vector<double> parse_iou_spec(const std::string& spec);
std::array<double, 3> parse_ratio_spec(const std::string& spec);

} // namespace canopy::cli
