#include "commands.hpp"

#include <cstdio>

#include "canopy/synth/generate.hpp"
#include "canopy/synth/spec.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

int run_synth(const SynthArgs& a) {
    require_flag(a.spec, "--spec");
    require_flag(a.out, "--out");
    synth::SynthSpec spec = synth::load_synth_spec(a.spec);

    RunContext run("synth", a.out, /*dir_mode=*/true);
    run.param("seed", static_cast<std::int64_t>(spec.seed));
    run.param("tree_count", spec.tree_count);
    run.input_file("spec", a.spec);

    synth::FixturePaths paths = synth::generate_fixture(spec, run.stage());
    synth::TruthLedger ledger = synth::load_truth_ledger(paths.ledger);
    run.note("trees", ledger.trees.size());
    run.note("epsg", ledger.epsg);
    run.finalize();

    std::printf("generated fixture with %zu trees (epochs %s -> %s) in %s\n",
                ledger.trees.size(), ledger.earlier_epoch.c_str(),
                ledger.later_epoch.c_str(), a.out.c_str());
    return 0;
}

} // namespace canopy::cli
