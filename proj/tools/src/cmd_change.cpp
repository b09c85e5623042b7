#include "commands.hpp"

#include <cstdio>

#include "canopy/change/match.hpp"
#include "canopy/change/report.hpp"
#include "canopy/detect/geojson.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

ChangeStageResult stage_change(const fs::path& before_file, const fs::path& after_file,
                               const std::optional<fs::path>& regions_file, double max_dist,
                               const std::string& strategy, const fs::path& out_dir) {
    detect::InstanceSet earlier = detect::read_instances_geojson(before_file);
    detect::InstanceSet later = detect::read_instances_geojson(after_file);

    change::MatchOptions opts;
    opts.max_dist_m = max_dist;
    opts.strategy = change::match_strategy_from_name(strategy);
    std::vector<change::ChangeRecord> records = change::match_epochs(earlier, later, opts);

    std::vector<detect::RegionDef> regions;
    if (regions_file) regions = detect::read_regions_geojson(*regions_file);
    change::RegionReportResult report = change::region_report(records, earlier, later, regions);
    for (const auto& warning : report.warnings)
        std::fprintf(stderr, "warning: %s\n", warning.c_str());

    change::ChangeRunMeta meta{earlier.epoch, later.epoch, strategy, max_dist};
    change::write_changes_geojson(records, earlier, later, out_dir / "changes.geojson");
    change::write_region_report_csv(report.rows, out_dir / "report.csv");
    change::write_change_summary_md(report.rows, report.warnings, meta,
                                    out_dir / "summary.md");

    ChangeStageResult res;
    const change::RegionReport& scene = report.rows.front();
    res.persisted = static_cast<std::size_t>(scene.persisted);
    res.gained = static_cast<std::size_t>(scene.gained);
    res.lost = static_cast<std::size_t>(scene.lost);
    return res;
}

int run_change(const ChangeArgs& a) {
    require_flag(a.before, "--before");
    require_flag(a.after, "--after");
    require_flag(a.out, "--out");
    change::match_strategy_from_name(a.strategy); // validate before staging

    RunContext run("change", a.out, /*dir_mode=*/true);
    run.param("max_dist", a.max_dist);
    run.param("strategy", a.strategy);
    run.input_file("before", a.before);
    run.input_file("after", a.after);
    std::optional<fs::path> regions;
    if (!a.regions.empty()) {
        regions = a.regions;
        run.input_file("regions", a.regions);
    }

    ChangeStageResult res =
        stage_change(a.before, a.after, regions, a.max_dist, a.strategy, run.stage());
    run.note("persisted", res.persisted);
    run.note("gained", res.gained);
    run.note("lost", res.lost);
    run.finalize();

    std::printf("persisted=%zu gained=%zu lost=%zu\n", res.persisted, res.gained, res.lost);
    return 0;
}

} // namespace canopy::cli
