#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "canopy/metrics/ap.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/hash.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

int resolve_jobs(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("CANOPY_DELTA_JOBS")) {
        char* end = nullptr;
        long n = std::strtol(env, &end, 10);
        if (end && *end == '\0' && n > 0) return static_cast<int>(n);
    }
    return 1;
}

void require_flag(const std::string& value, const char* flag) {
    if (value.empty())
        throw ConfigError(std::string("missing required flag ") + flag);
}

namespace {

std::string iso_utc(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_file(const fs::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

} // namespace

RunContext::RunContext(std::string subcommand, fs::path target, bool dir_mode)
    : subcommand_(std::move(subcommand)),
      target_(std::move(target)),
      dir_mode_(dir_mode),
      started_(std::chrono::system_clock::now()) {
    if (target_.empty()) throw ConfigError("empty output path");
    stage_ = target_;
    stage_ += ".staging";
    std::error_code ec;
    fs::remove_all(stage_, ec);
    fs::create_directories(stage_);
}

RunContext::~RunContext() {
    if (finalized_) return;
    // The run threw before finalize(): keep the partial output out of the
    // target path but preserve it for inspection.
    std::error_code ec;
    fs::path failed = target_;
    failed += ".failed";
    fs::remove_all(failed, ec);
    fs::rename(stage_, failed, ec);
    if (ec) fs::remove_all(stage_, ec);
}

void RunContext::param(const std::string& key, const std::string& value) { params_[key] = value; }
void RunContext::param(const std::string& key, std::int64_t value) { params_[key] = value; }
void RunContext::param(const std::string& key, double value) { params_[key] = value; }
void RunContext::param(const std::string& key, bool value) { params_[key] = value; }

void RunContext::input_file(const std::string& name, const fs::path& path) {
    inputs_[name] = {{"path", path.filename().string()},
                     {"fnv1a64", to_hex(fnv1a64_file(path))}};
}

void RunContext::input_dir(const std::string& name, const fs::path& path) {
    // Order-independent fingerprint: hash each file, combine sorted by
    // relative path.
    std::vector<std::pair<std::string, std::uint64_t>> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (!entry.is_regular_file()) continue;
        files.emplace_back(fs::relative(entry.path(), path).generic_string(),
                           fnv1a64_file(entry.path()));
    }
    std::sort(files.begin(), files.end());
    std::uint64_t combined = 0xcbf29ce484222325ull;
    for (const auto& [rel, h] : files) {
        for (char c : rel) combined = (combined ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
        for (int i = 0; i < 8; ++i)
            combined = (combined ^ ((h >> (8 * i)) & 0xff)) * 0x100000001b3ull;
    }
    inputs_[name] = {{"path", path.filename().string()},
                     {"files", files.size()},
                     {"fnv1a64", to_hex(combined)}};
}

void RunContext::note(const std::string& key, const nlohmann::json& value) { notes_[key] = value; }

void RunContext::finalize() {
    const auto finished = std::chrono::system_clock::now();

    nlohmann::json manifest{{"tool", kToolName},
                            {"version", kToolVersion},
                            {"subcommand", subcommand_},
                            {"parameters", params_},
                            {"inputs", inputs_}};
    if (!notes_.empty()) manifest["notes"] = notes_;

    nlohmann::json timings{
        {"started_utc", iso_utc(started_)},
        {"finished_utc", iso_utc(finished)},
        {"duration_s", std::chrono::duration<double>(finished - started_).count()}};

    std::string prefix = dir_mode_ ? std::string() : target_.filename().string() + ".";
    write_json_file(stage_ / (prefix + "run_manifest.json"), manifest);
    write_json_file(stage_ / (prefix + "run_timings.json"), timings);

    // Commit: move staged children into the target directory (the parent
    // directory in file mode), replacing stale entries from earlier runs.
    fs::path dest = dir_mode_ ? target_ : target_.parent_path();
    if (dest.empty()) dest = ".";
    fs::create_directories(dest);
    for (const auto& entry : fs::directory_iterator(stage_)) {
        fs::path to = dest / entry.path().filename();
        std::error_code ec;
        fs::remove_all(to, ec);
        fs::rename(entry.path(), to);
    }
    fs::remove_all(stage_);
    finalized_ = true;
}

std::vector<double> parse_iou_spec(const std::string& spec) {
    auto fail = [&] {
        throw ConfigError("bad --iou value '" + spec +
                          "' (expected \"0.5:0.95\" or a comma-separated list)");
    };
    std::vector<double> out;
    auto parse_one = [&](const std::string& tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            fail();
        }
        if (used != tok.size() || !(v > 0.0) || v > 1.0) fail();
        return v;
    };
    if (spec.find(':') != std::string::npos) {
        auto pos = spec.find(':');
        double lo = parse_one(spec.substr(0, pos));
        double hi = parse_one(spec.substr(pos + 1));
        if (lo != 0.5 || hi != 0.95)
            throw ConfigError("only the 0.5:0.95 threshold range is supported; "
                              "use an explicit list for other thresholds");
        return metrics::iou_threshold_range();
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto comma = spec.find(',', start);
        std::string tok = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
        if (tok.empty()) fail();
        out.push_back(parse_one(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (out.empty()) fail();
    return out;
}

std::array<double, 3> parse_ratio_spec(const std::string& spec) {
    std::array<double, 3> r{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
        auto comma = spec.find(',', start);
        bool last = (i == 2);
        if (last != (comma == std::string::npos))
            throw ConfigError("bad --ratios value '" + spec + "' (expected three numbers)");
        std::string tok = spec.substr(start, last ? std::string::npos : comma - start);
        std::size_t used = 0;
        try {
            r[i] = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (used != tok.size())
            throw ConfigError("bad --ratios value '" + spec + "' (expected three numbers)");
        start = comma + 1;
    }
    return r;
}

} // namespace canopy::cli
