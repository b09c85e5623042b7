#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "canopy/train/config.hpp"
#include "canopy/train/fit_toy.hpp"
#include "canopy/train/gradcheck.hpp"
#include "canopy/train/sgd.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

namespace canopy::cli {

namespace {

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

double norm(const std::vector<double>& p) {
    return std::sqrt(std::inner_product(p.begin(), p.end(), p.begin(), 0.0));
}

std::vector<Check> run_checks(std::uint64_t seed) {
    std::vector<Check> checks;
    char detail[160];

    auto sweep = [&](const char* name, train::GradCheckReport rep, double tol) {
        std::snprintf(detail, sizeof detail, "max rel err %.3g over %zu coords (tol %g)",
                      rep.max_rel_err, rep.checks, tol);
        checks.push_back({name, rep.max_rel_err < tol, detail});
    };
    sweep("box-loss gradient vs finite differences (squared form)",
          train::sweep_box_loss(100, seed, train::BoxLossForm::squared), 1e-5);
    sweep("box-loss gradient vs finite differences (smooth-L1 form)",
          train::sweep_box_loss(100, seed + 1, train::BoxLossForm::smooth_l1), 1e-5);
    sweep("mask BCE gradient vs finite differences",
          train::sweep_bce(100, seed + 2), 1e-5);

    {
        // Worked single-parameter update: v1 = 0.938*0 - 0.01*2 - 0.0005*0.01*1,
        // p1 = 1 + v1.
        train::OptimizerState st{{1.0}, {0.0}, 0};
        train::sgd_step(st, std::vector<double>{2.0}, {0.01, 0.938, 0.0005});
        double ev = std::fabs(st.v[0] - (-0.020005));
        double ep = std::fabs(st.p[0] - 0.979995);
        std::snprintf(detail, sizeof detail, "|v1 err|=%.3g |p1 err|=%.3g (tol 1e-15)", ev, ep);
        checks.push_back({"momentum update worked example", ev < 1e-15 && ep < 1e-15, detail});
    }
    {
        // Zero momentum and decay must reproduce plain gradient descent
        // bit-for-bit.
        Rng rng = Rng::stream(seed, "mathcheck.gd");
        bool exact = true;
        for (int trial = 0; trial < 32 && exact; ++trial) {
            std::vector<double> p(8), g(8);
            for (double& x : p) x = rng.uniform(-5.0, 5.0);
            for (double& x : g) x = rng.uniform(-5.0, 5.0);
            double lr = rng.uniform(1e-4, 0.5);
            train::OptimizerState st{p, std::vector<double>(8, 0.0), 0};
            train::sgd_step(st, g, {lr, 0.0, 0.0});
            for (int i = 0; i < 8; ++i)
                if (st.p[i] != p[i] - lr * g[i]) exact = false;
        }
        checks.push_back({"zero-momentum update equals plain gradient descent",
                          exact, exact ? "bit-for-bit over 32 random states" : "mismatch"});
    }
    {
        train::FitResult fit =
            train::fit_toy(train::ToyProblem::quadratic_bowl, {0.1, 0.0, 0.0}, 200);
        double n = norm(fit.params);
        std::snprintf(detail, sizeof detail, "|p| = %.3g after 200 steps (tol 1e-8)", n);
        checks.push_back({"quadratic bowl converges (lr 0.1, no momentum)",
                          !fit.diverged && n < 1e-8, detail});
    }
    {
        train::FitResult fit =
            train::fit_toy(train::ToyProblem::quadratic_bowl, {0.01, 0.938, 0.0005}, 2000);
        double n = norm(fit.params);
        std::snprintf(detail, sizeof detail, "|p| = %.3g after 2000 steps (tol 1e-3)", n);
        checks.push_back({"quadratic bowl converges (default hyperparameters)",
                          !fit.diverged && n < 1e-3, detail});
    }
    {
        // lr 2.5 is beyond the 2/curvature stability bound of the bowl.
        train::FitResult fit =
            train::fit_toy(train::ToyProblem::quadratic_bowl, {2.5, 0.0, 0.0}, 2000);
        std::snprintf(detail, sizeof detail, "divergence flagged at step %d",
                      fit.divergence_step);
        checks.push_back({"unstable learning rate reported as divergence",
                          fit.diverged && fit.divergence_step >= 0, detail});
    }
    {
        train::FitResult fit =
            train::fit_toy(train::ToyProblem::mask_logits, {0.5, 0.938, 0.0005}, 300);
        double initial = fit.loss.front(), final_loss = fit.loss.back();
        std::snprintf(detail, sizeof detail, "loss %.4f -> %.4f", initial, final_loss);
        checks.push_back({"mask-logit toy problem improves under training",
                          !fit.diverged && final_loss < initial, detail});
    }
    return checks;
}

} // namespace

int run_mathcheck(const MathcheckArgs& a) {
    std::vector<Check> checks;
    if (!a.config.empty()) {
        train::TrainConfig cfg = train::load_train_config(a.config);
        cfg.validate(a.allow_custom);
        char detail[160];
        std::snprintf(detail, sizeof detail,
                      "lr=%g epochs=%d batch=%d momentum=%g decay=%g",
                      cfg.learning_rate, cfg.epochs, cfg.batch_size, cfg.momentum,
                      cfg.weight_decay);
        checks.push_back({"training config validates", true, detail});
    }
    for (auto& c : run_checks(a.seed)) checks.push_back(std::move(c));

    std::size_t failed = 0;
    for (const auto& c : checks) {
        std::printf("%-4s %s (%s)\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                    c.detail.c_str());
        if (!c.passed) ++failed;
    }
    std::printf("%zu/%zu checks passed\n", checks.size() - failed, checks.size());

    if (!a.out.empty()) {
        RunContext run("mathcheck", a.out, /*dir_mode=*/true);
        run.param("seed", static_cast<std::int64_t>(a.seed));
        if (!a.config.empty()) run.input_file("config", a.config);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& c : checks)
            rows.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        nlohmann::json doc{{"checks", rows},
                           {"passed", checks.size() - failed},
                           {"failed", failed}};
        std::ofstream out(run.stage() / "mathcheck_report.json", std::ios::binary);
        out << doc.dump(2) << '\n';
        run.note("failed", failed);
        run.finalize();
    }

    if (failed > 0)
        throw DomainError(std::to_string(failed) + " of " + std::to_string(checks.size()) +
                          " numeric checks failed");
    return 0;
}

} // namespace canopy::cli
