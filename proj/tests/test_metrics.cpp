#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "canopy/metrics/eval.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

#include "ref.hpp"

using namespace canopy;
using namespace canopy::metrics;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("canopy_metrics_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

raster::Grid<std::uint8_t> rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
    raster::Grid<std::uint8_t> g(w, h, 0);
    for (int r = y0; r < y0 + rh; ++r)
        for (int c = x0; c < x0 + rw; ++c) g.at(r, c) = 1;
    return g;
}

std::vector<std::uint8_t> rect_mask_flat(int w, int h, int x0, int y0, int rw, int rh) {
    std::vector<std::uint8_t> g(static_cast<std::size_t>(w) * h, 0);
    for (int r = y0; r < y0 + rh; ++r)
        for (int c = x0; c < x0 + rw; ++c) g[static_cast<std::size_t>(r) * w + c] = 1;
    return g;
}

} // namespace

TEST_CASE("iou_box hand values and degeneracy") {
    CHECK(iou_box({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(iou_box({3, 4, 5, 6}, {3, 4, 5, 6}) == 1.0);
    CHECK(iou_box({0, 0, 1, 1}, {5, 5, 1, 1}) == 0.0);
    CHECK(iou_box({0, 0, 1, 1}, {1, 0, 1, 1}) == 0.0); // touching edges do not overlap
    CHECK_THROWS_AS(iou_box({0, 0, 0, 1}, {0, 0, 1, 1}), DomainError);
    CHECK_THROWS_AS(iou_box({0, 0, 1, 1}, {0, 0, 1, -1}), DomainError);
}

TEST_CASE("iou_box agrees with the reference formula on random boxes") {
    Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        const Box a{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 20),
                    rng.uniform(1, 20)};
        const Box b{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(1, 20),
                    rng.uniform(1, 20)};
        const double got = iou_box(a, b);
        const double want =
            ref::iou_box({a.x, a.y, a.w, a.h}, {b.x, b.y, b.w, b.h});
        REQUIRE(std::abs(got - want) < 1e-12);
        REQUIRE(got >= 0.0);
        REQUIRE(got <= 1.0);
    }
}

TEST_CASE("iou_mask counts pixels and matches box iou on aligned rectangles") {
    const auto a = rect_mask(16, 16, 0, 0, 4, 4);
    const auto b = rect_mask(16, 16, 2, 2, 4, 4);
    CHECK(iou_mask(a, b) == iou_box({0, 0, 4, 4}, {2, 2, 4, 4}));
    CHECK(iou_mask(a, a) == 1.0);
    CHECK(iou_mask(a, rect_mask(16, 16, 10, 10, 2, 2)) == 0.0);

    const raster::Grid<std::uint8_t> blank(16, 16, 0);
    CHECK(iou_mask(a, blank) == 0.0);
    CHECK_THROWS_AS(iou_mask(blank, blank), DomainError);
    CHECK_THROWS_AS(iou_mask(a, rect_mask(8, 8, 0, 0, 2, 2)), DomainError);
}

TEST_CASE("match_instances basics") {
    // two predictions, one ground truth: winner takes it, loser is a FP
    raster::Grid<double> iou(1, 2, 0.0);
    iou.at(0, 0) = 0.8;
    iou.at(1, 0) = 0.6;
    const MatchResult r = match_instances({0.9, 0.8}, iou, 0.5);
    CHECK(r.pred_to_gt == std::vector<int>{0, -1});
    CHECK(r.counts.tp == 1);
    CHECK(r.counts.fp == 1);
    CHECK(r.counts.fn == 0);
}

TEST_CASE("match_instances resolves ties deterministically") {
    // equal IoU against two ground truths: lowest GT index wins
    raster::Grid<double> tie(2, 1, 0.7);
    const MatchResult a = match_instances({0.9}, tie, 0.5);
    CHECK(a.pred_to_gt == std::vector<int>{0});
    CHECK(a.counts.fn == 1);

    // equal scores: input order decides who claims first
    raster::Grid<double> iou(1, 2, 0.0);
    iou.at(0, 0) = 0.6;
    iou.at(1, 0) = 0.9;
    const MatchResult b = match_instances({0.5, 0.5}, iou, 0.5);
    CHECK(b.pred_to_gt == std::vector<int>{0, -1});

    // higher score claims first even when listed later
    const MatchResult c = match_instances({0.3, 0.9}, iou, 0.5);
    CHECK(c.pred_to_gt == std::vector<int>{-1, 0});
}

TEST_CASE("match_instances thresholds and validation") {
    raster::Grid<double> iou(1, 1, 0.45);
    const MatchResult r = match_instances({0.9}, iou, 0.5);
    CHECK(r.counts.tp == 0);
    CHECK(r.counts.fp == 1);
    CHECK(r.counts.fn == 1);

    // boundary: IoU exactly at the threshold still matches
    raster::Grid<double> at(1, 1, 0.5);
    CHECK(match_instances({0.9}, at, 0.5).counts.tp == 1);

    CHECK_THROWS_AS(match_instances({0.9}, iou, 0.0), DomainError);
    CHECK_THROWS_AS(match_instances({0.9}, iou, 1.5), DomainError);
    raster::Grid<double> wrong(1, 3, 0.9);
    CHECK_THROWS_AS(match_instances({0.9}, wrong, 0.5), DomainError);

    const MatchResult empty = match_instances({}, raster::Grid<double>(2, 0), 0.5);
    CHECK(empty.counts.tp == 0);
    CHECK(empty.counts.fn == 2);
}

TEST_CASE("precision and recall flag the 0/0 cases") {
    bool undef = true;
    CHECK(precision({3, 1, 2}, &undef) == 0.75);
    CHECK_FALSE(undef);
    CHECK(recall({3, 1, 2}, &undef) == 0.6);
    CHECK_FALSE(undef);

    CHECK(precision({0, 0, 5}, &undef) == 0.0);
    CHECK(undef);
    CHECK(recall({0, 0, 5}, &undef) == 0.0);
    CHECK_FALSE(undef);

    CHECK(recall({0, 4, 0}, &undef) == 0.0);
    CHECK(undef);
    CHECK(precision({0, 0, 0}) == 0.0); // null flag pointer is fine
}

TEST_CASE("pr curve staircase from sweep flags") {
    const PRCurve curve =
        pr_curve_from_flags({1, 0, 1, 1}, {0.9, 0.8, 0.7, 0.6}, 3, 0.5);
    REQUIRE(curve.points.size() == 4);
    CHECK(curve.n_gt == 3);
    CHECK(curve.iou_threshold == 0.5);
    CHECK(curve.points[0].score == 0.9);
    CHECK(curve.points[0].recall == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(curve.points[0].precision == 1.0);
    CHECK(curve.points[1].precision == 0.5);
    CHECK(curve.points[2].recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve.points[2].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(curve.points[3].recall == 1.0);
    CHECK(curve.points[3].precision == 0.75);

    CHECK_THROWS_AS(pr_curve_from_flags({1, 0}, {0.9}, 3, 0.5), DomainError);
}

TEST_CASE("average precision of the worked four-prediction example") {
    const PRCurve curve =
        pr_curve_from_flags({1, 0, 1, 1}, {0.9, 0.8, 0.7, 0.6}, 3, 0.5);
    // envelope 1.0 up to recall 1/3, then 3/4: 34 + 67 * 0.75 points of 101
    CHECK(std::abs(average_precision(curve, ApInterpolation::points101) -
                   0.8341584158415841) < 1e-15);
    // exact area: 1/3 * 1 + 2/3 * 3/4
    CHECK(std::abs(average_precision(curve, ApInterpolation::all_points) - 5.0 / 6.0) <
          1e-15);

    PRCurve no_gt = curve;
    no_gt.n_gt = 0;
    CHECK_THROWS_AS(average_precision(no_gt), DomainError);

    // no predictions but ground truth exists: zero, not an error
    const PRCurve empty = pr_curve_from_flags({}, {}, 4, 0.5);
    CHECK(average_precision(empty) == 0.0);
    CHECK(average_precision(empty, ApInterpolation::all_points) == 0.0);
}

TEST_CASE("perfect sweep yields AP 1 under both interpolations") {
    const PRCurve curve = pr_curve_from_flags({1, 1, 1}, {0.9, 0.8, 0.7}, 3, 0.5);
    CHECK(average_precision(curve, ApInterpolation::points101) == 1.0);
    CHECK(average_precision(curve, ApInterpolation::all_points) == 1.0);
}

TEST_CASE("random sweeps agree with the reference AP integrator") {
    Rng rng(5150);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 25));
        const std::int64_t n_gt = rng.uniform_int(1, 12);
        std::vector<char> flags;
        std::vector<double> scores;
        std::int64_t tp = 0;
        double s = 1.0;
        for (int i = 0; i < n; ++i) {
            const bool hit = tp < n_gt && rng.bernoulli(0.5);
            flags.push_back(hit ? 1 : 0);
            tp += hit ? 1 : 0;
            s -= rng.uniform(0.001, 0.02);
            scores.push_back(s);
        }
        const PRCurve curve = pr_curve_from_flags(flags, scores, n_gt, 0.5);
        for (bool p101 : {true, false}) {
            const double got = average_precision(
                curve, p101 ? ApInterpolation::points101 : ApInterpolation::all_points);
            const double want = ref::ap_from_outcomes(flags, n_gt, p101);
            REQUIRE(std::abs(got - want) < 1e-12);
        }
    }
}

TEST_CASE("mean_average_precision") {
    CHECK(std::abs(mean_average_precision({0.4, 0.8}) - 0.6) < 1e-15);
    CHECK(mean_average_precision({0.25}) == 0.25);
    CHECK_THROWS_AS(mean_average_precision({}), DomainError);
}

TEST_CASE("iou_threshold_range spells out 0.50..0.95") {
    const auto ts = iou_threshold_range();
    REQUIRE(ts.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(ts[k] == (50 + 5 * k) / 100.0);
}

namespace {

// one class, one image: exact match, a half-overlap, and a miss
std::vector<EvalImage> hand_images() {
    EvalImage img;
    img.id = "18/1/1";
    img.gt.push_back({"tree", {0, 0, 10, 10}, {}});
    img.gt.push_back({"tree", {20, 20, 10, 10}, {}});
    img.pred.push_back({"tree", 0.9, {0, 0, 10, 10}, {}});
    img.pred.push_back({"tree", 0.8, {20, 20, 5, 10}, {}}); // IoU exactly 0.5
    img.pred.push_back({"tree", 0.7, {40, 40, 10, 10}, {}});
    return {img};
}

} // namespace

TEST_CASE("evaluate_dataset worked example, box only") {
    EvalOptions opt;
    opt.with_masks = false;
    const EvalSummary s = evaluate_dataset(hand_images(), opt);

    REQUIRE(s.thresholds.size() == 10);
    REQUIRE(s.classes.size() == 1);
    const ClassEval& ce = s.classes[0];
    CHECK(ce.label == "tree");
    CHECK(ce.n_gt == 2);
    CHECK(ce.n_pred == 3);
    REQUIRE(ce.box.size() == 10);
    CHECK(ce.mask.empty());

    // at 0.50 the half-overlap matches (boundary inclusive) -> AP 1
    CHECK(ce.box[0].ap == 1.0);
    // above 0.50 it becomes a FP: envelope 1 up to recall 0.5, zero beyond
    CHECK(std::abs(ce.box[1].ap - 51.0 / 101.0) < 1e-12);
    CHECK(std::abs(ce.box[9].ap - 51.0 / 101.0) < 1e-12);

    CHECK(s.map_box_50 == 1.0);
    CHECK(std::abs(s.map_box_range - (1.0 + 9.0 * (51.0 / 101.0)) / 10.0) < 1e-12);
    CHECK(s.has_pair);
    CHECK(std::abs(s.map_box_pair - (1.0 + 51.0 / 101.0) / 2.0) < 1e-12);
    CHECK_FALSE(s.has_masks);

    CHECK(s.detection_rate_50 == 1.0);
    CHECK(s.total_gt == 2);
    CHECK(s.total_pred == 3);
    CHECK_FALSE(s.precision_undefined_seen);
    CHECK_FALSE(s.recall_undefined_seen);
}

TEST_CASE("rectangular masks reproduce the box scores exactly") {
    auto images = hand_images();
    auto& img = images[0];
    img.gt[0].mask = rect_mask(64, 64, 0, 0, 10, 10);
    img.gt[1].mask = rect_mask(64, 64, 20, 20, 10, 10);
    img.pred[0].mask = rect_mask(64, 64, 0, 0, 10, 10);
    img.pred[1].mask = rect_mask(64, 64, 20, 20, 5, 10);
    img.pred[2].mask = rect_mask(64, 64, 40, 40, 10, 10);

    const EvalSummary s = evaluate_dataset(images, {});
    CHECK(s.has_masks);
    REQUIRE(s.classes[0].mask.size() == 10);
    for (int k = 0; k < 10; ++k)
        CHECK(s.classes[0].mask[k].ap == s.classes[0].box[k].ap);
    CHECK(s.map_mask_50 == s.map_box_50);
    CHECK(s.map_mask_range == s.map_box_range);
    CHECK(s.map_mask_pair == s.map_box_pair);
}

TEST_CASE("classes without ground truth are excluded from the mean") {
    EvalImage img;
    img.id = "z";
    img.gt.push_back({"tree", {0, 0, 10, 10}, {}});
    img.gt.push_back({"bush", {50, 50, 10, 10}, {}});
    img.pred.push_back({"tree", 0.9, {0, 0, 10, 10}, {}});
    img.pred.push_back({"shrub", 0.5, {80, 80, 10, 10}, {}});

    EvalOptions opt;
    opt.with_masks = false;
    const EvalSummary s = evaluate_dataset({img}, opt);
    REQUIRE(s.classes.size() == 3);

    // bush: GT but no predictions -> AP 0, counted in the mean
    // shrub: predictions but no GT -> skipped by the mean, flagged
    CHECK(s.map_box_50 == 0.5);
    CHECK(s.map_box_range == 0.5);
    CHECK(s.detection_rate_50 == 0.5);
    CHECK(s.precision_undefined_seen); // bush had no predictions
    CHECK(s.recall_undefined_seen);    // shrub had no ground truth

    for (const ClassEval& ce : s.classes) {
        if (ce.label == "shrub") {
            CHECK(ce.n_gt == 0);
            for (const auto& te : ce.box) CHECK(te.ap == 0.0);
        }
    }
}

TEST_CASE("evaluate_dataset rejects datasets with no ground truth at all") {
    EvalImage img;
    img.id = "a";
    img.pred.push_back({"tree", 0.9, {0, 0, 10, 10}, {}});
    EvalOptions opt;
    opt.with_masks = false;
    CHECK_THROWS_AS(evaluate_dataset({img}, opt), DomainError);
    CHECK_THROWS_AS(evaluate_dataset({}, opt), DomainError);

    EvalOptions bad;
    bad.thresholds = {0.5, 0.0};
    CHECK_THROWS_AS(evaluate_dataset(hand_images(), bad), DomainError);
}

TEST_CASE("random scenes score identically to the reference evaluator") {
    Rng rng(424242);
    const std::vector<double> taus = iou_threshold_range();

    for (int scene = 0; scene < 50; ++scene) {
        std::vector<EvalImage> images;
        std::vector<ref::RefImage> rimages;
        const int n_img = static_cast<int>(rng.uniform_int(1, 3));
        std::int64_t total_gt = 0;

        for (int im = 0; im < n_img; ++im) {
            EvalImage img;
            img.id = "img_" + std::to_string(im); // sorted order == vector order
            ref::RefImage rimg;

            const int n_gt = static_cast<int>(rng.uniform_int(0, 10));
            const int n_pred = static_cast<int>(rng.uniform_int(0, 20));
            total_gt += n_gt;

            auto random_box = [&]() {
                return Box{rng.uniform(0.0, 48.0), rng.uniform(0.0, 48.0),
                           rng.uniform(4.0, 16.0), rng.uniform(4.0, 16.0)};
            };
            auto box_rect = [&](const Box& b) {
                const int x0 = std::clamp(static_cast<int>(std::lround(b.x)), 0, 60);
                const int y0 = std::clamp(static_cast<int>(std::lround(b.y)), 0, 60);
                const int w = std::clamp(static_cast<int>(std::lround(b.w)), 1, 64 - x0);
                const int h = std::clamp(static_cast<int>(std::lround(b.h)), 1, 64 - y0);
                return std::array<int, 4>{x0, y0, w, h};
            };

            for (int g = 0; g < n_gt; ++g) {
                const Box b = random_box();
                const auto r = box_rect(b);
                img.gt.push_back({"tree", b, rect_mask(64, 64, r[0], r[1], r[2], r[3])});
                rimg.gt.push_back({{b.x, b.y, b.w, b.h},
                                   rect_mask_flat(64, 64, r[0], r[1], r[2], r[3])});
            }
            for (int p = 0; p < n_pred; ++p) {
                const Box b = random_box();
                const auto r = box_rect(b);
                const double score = rng.uniform01();
                img.pred.push_back(
                    {"tree", score, b, rect_mask(64, 64, r[0], r[1], r[2], r[3])});
                rimg.pred.push_back({score,
                                     {b.x, b.y, b.w, b.h},
                                     rect_mask_flat(64, 64, r[0], r[1], r[2], r[3])});
            }
            images.push_back(std::move(img));
            rimages.push_back(std::move(rimg));
        }
        if (total_gt == 0) {
            const Box b{10, 10, 8, 8};
            images[0].gt.push_back({"tree", b, rect_mask(64, 64, 10, 10, 8, 8)});
            rimages[0].gt.push_back(
                {{b.x, b.y, b.w, b.h}, rect_mask_flat(64, 64, 10, 10, 8, 8)});
        }

        for (bool p101 : {true, false}) {
            EvalOptions opt;
            opt.interp = p101 ? ApInterpolation::points101 : ApInterpolation::all_points;
            const EvalSummary s = evaluate_dataset(images, opt);

            REQUIRE(std::abs(s.map_box_50 -
                             ref::dataset_ap(rimages, 0.5, false, p101)) <= 1e-9);
            REQUIRE(std::abs(s.map_box_range -
                             ref::dataset_map(rimages, taus, false, p101)) <= 1e-9);
            REQUIRE(s.has_masks);
            REQUIRE(std::abs(s.map_mask_50 -
                             ref::dataset_ap(rimages, 0.5, true, p101)) <= 1e-9);
            REQUIRE(std::abs(s.map_mask_range -
                             ref::dataset_map(rimages, taus, true, p101)) <= 1e-9);
        }
    }
}

TEST_CASE("summary JSON layout") {
    const fs::path dir = temp_dir("json");
    EvalOptions opt;
    opt.with_masks = false;
    const EvalSummary s = evaluate_dataset(hand_images(), opt);
    write_eval_summary_json(s, dir / "eval.json");

    std::ifstream in(dir / "eval.json");
    nlohmann::json j;
    in >> j;

    REQUIRE(j.contains("classes"));
    REQUIRE(j["classes"].size() == 1);
    const auto& c = j["classes"][0];
    CHECK(c["label"] == "tree");
    CHECK(c["n_gt"] == 2);
    CHECK(c["n_pred"] == 3);
    CHECK(c["ap_box"]["0.50"] == 1.0);
    CHECK(c["ap_box"].size() == 10);
    CHECK(c["ap_mask"].is_null());

    CHECK(j["map_box"]["at_050"] == 1.0);
    CHECK(j["map_box"].contains("range_050_095"));
    CHECK(j["map_box"].contains("pair_050_095"));
    CHECK(j["map_mask"].is_null());
    CHECK(j["thresholds"].size() == 10);
    CHECK(j["totals"]["gt"] == 2);
    CHECK(j["totals"]["pred"] == 3);
    CHECK(j["detection_rate_50"] == 1.0);
    CHECK(j["flags"]["precision_undefined"] == false);
    CHECK(j["flags"]["recall_undefined"] == false);

    // deterministic bytes
    write_eval_summary_json(s, dir / "eval2.json");
    std::ifstream a(dir / "eval.json", std::ios::binary);
    std::ifstream b(dir / "eval2.json", std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
}

TEST_CASE("PR curve CSV layout") {
    const fs::path dir = temp_dir("csv");
    EvalOptions opt;
    opt.with_masks = false;
    const EvalSummary s = evaluate_dataset(hand_images(), opt);
    write_pr_curves_csv(s, dir / "pr.csv");

    std::ifstream in(dir / "pr.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "metric,label,iou_threshold,score,recall,precision");

    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CHECK(line.rfind("box,tree,0.", 0) == 0);
        ++rows;
    }
    CHECK(rows == 30); // 10 thresholds x 3 predictions, box only
}
