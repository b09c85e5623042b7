#include "canopy/metrics/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "canopy/util/error.hpp"

namespace canopy::metrics {

using nlohmann::json;

namespace {

struct ClassImageSlice {
    std::vector<int> gt_idx;
    std::vector<int> pred_idx;           // input order within the image
    raster::Grid<double> iou_box_matrix; // pred x gt
    raster::Grid<double> iou_mask_matrix;
    std::vector<double> scores;
    bool masks_ok = true;
};

int find_threshold(const std::vector<double>& ts, double wanted) {
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (std::abs(ts[i] - wanted) < 1e-9) return static_cast<int>(i);
    return -1;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

EvalSummary evaluate_dataset(const std::vector<EvalImage>& images,
                             const EvalOptions& options) {
    EvalOptions opt = options;
    if (opt.thresholds.empty()) opt.thresholds = iou_threshold_range();
    for (double t : opt.thresholds)
        if (!(t > 0.0 && t <= 1.0))
            throw DomainError("IoU thresholds must be in (0, 1]");

    // deterministic image order: sorted by id
    std::vector<int> image_order(images.size());
    std::iota(image_order.begin(), image_order.end(), 0);
    std::sort(image_order.begin(), image_order.end(), [&](int a, int b) {
        if (images[a].id != images[b].id) return images[a].id < images[b].id;
        return a < b;
    });

    std::set<std::string> label_set;
    for (const EvalImage& img : images) {
        for (const auto& g : img.gt) label_set.insert(g.label);
        for (const auto& p : img.pred) label_set.insert(p.label);
    }

    EvalSummary summary;
    summary.thresholds = opt.thresholds;

    std::int64_t dr_tp = 0; // detection-rate bookkeeping at box IoU 0.50
    std::int64_t dr_gt = 0;

    for (const std::string& label : label_set) {
        ClassEval ce;
        ce.label = label;

        // slice per image and precompute IoU matrices once
        std::vector<ClassImageSlice> slices;
        slices.reserve(images.size());
        bool class_masks_ok = opt.with_masks;
        for (int oi : image_order) {
            const EvalImage& img = images[oi];
            ClassImageSlice s;
            for (int i = 0; i < static_cast<int>(img.gt.size()); ++i)
                if (img.gt[i].label == label) s.gt_idx.push_back(i);
            for (int i = 0; i < static_cast<int>(img.pred.size()); ++i)
                if (img.pred[i].label == label) s.pred_idx.push_back(i);

            const int np = static_cast<int>(s.pred_idx.size());
            const int ng = static_cast<int>(s.gt_idx.size());
            ce.n_gt += ng;
            ce.n_pred += np;

            s.scores.reserve(np);
            for (int pi : s.pred_idx) s.scores.push_back(img.pred[pi].score);

            s.iou_box_matrix = raster::Grid<double>(ng, np, 0.0);
            for (int p = 0; p < np; ++p)
                for (int g = 0; g < ng; ++g)
                    s.iou_box_matrix.at(p, g) =
                        iou_box(img.pred[s.pred_idx[p]].box, img.gt[s.gt_idx[g]].box);

            if (class_masks_ok) {
                for (int pi : s.pred_idx)
                    if (img.pred[pi].mask.empty()) s.masks_ok = false;
                for (int gi : s.gt_idx)
                    if (img.gt[gi].mask.empty()) s.masks_ok = false;
                if (!s.masks_ok && (np > 0 || ng > 0)) class_masks_ok = false;
                if (s.masks_ok) {
                    s.iou_mask_matrix = raster::Grid<double>(ng, np, 0.0);
                    for (int p = 0; p < np; ++p)
                        for (int g = 0; g < ng; ++g)
                            s.iou_mask_matrix.at(p, g) = iou_mask(
                                img.pred[s.pred_idx[p]].mask, img.gt[s.gt_idx[g]].mask);
                }
            }
            slices.push_back(std::move(s));
        }

        if (ce.n_pred == 0) summary.precision_undefined_seen = true;
        if (ce.n_gt == 0) summary.recall_undefined_seen = true;

        // global sweep order: descending score, ties by (image order, index)
        struct SweepRef {
            int slice;
            int local; // position within the slice's prediction list
            double score;
        };
        std::vector<SweepRef> sweep;
        sweep.reserve(static_cast<std::size_t>(ce.n_pred));
        for (int si = 0; si < static_cast<int>(slices.size()); ++si)
            for (int p = 0; p < static_cast<int>(slices[si].scores.size()); ++p)
                sweep.push_back({si, p, slices[si].scores[p]});
        std::stable_sort(sweep.begin(), sweep.end(),
                         [](const SweepRef& a, const SweepRef& b) {
                             return a.score > b.score;
                         });
        std::vector<double> sweep_scores;
        sweep_scores.reserve(sweep.size());
        for (const SweepRef& r : sweep) sweep_scores.push_back(r.score);

        auto eval_metric = [&](bool use_mask) {
            std::vector<ThresholdEval> per_threshold;
            for (double tau : opt.thresholds) {
                // per-image matching, then flags lifted into the global order
                std::vector<std::vector<char>> tp_flags(slices.size());
                for (std::size_t si = 0; si < slices.size(); ++si) {
                    const auto& m = use_mask ? slices[si].iou_mask_matrix
                                             : slices[si].iou_box_matrix;
                    MatchResult r = match_instances(slices[si].scores, m, tau);
                    tp_flags[si].resize(slices[si].scores.size());
                    for (std::size_t p = 0; p < r.pred_to_gt.size(); ++p)
                        tp_flags[si][p] = r.pred_to_gt[p] >= 0;
                }
                std::vector<char> flags;
                flags.reserve(sweep.size());
                for (const SweepRef& r : sweep)
                    flags.push_back(tp_flags[r.slice][r.local]);

                ThresholdEval te;
                te.threshold = tau;
                te.curve = pr_curve_from_flags(flags, sweep_scores, ce.n_gt, tau);
                te.ap = ce.n_gt == 0 ? 0.0 : average_precision(te.curve, opt.interp);
                per_threshold.push_back(std::move(te));
            }
            return per_threshold;
        };

        ce.box = eval_metric(false);
        if (class_masks_ok) ce.mask = eval_metric(true);

        // detection rate at box IoU 0.50
        for (auto& s : slices) {
            MatchResult r = match_instances(s.scores, s.iou_box_matrix, 0.5);
            dr_tp += r.counts.tp;
            dr_gt += static_cast<std::int64_t>(s.gt_idx.size());
        }

        summary.total_gt += ce.n_gt;
        summary.total_pred += ce.n_pred;
        summary.classes.push_back(std::move(ce));
    }

    // Eq-3 means over classes with defined AP (n_gt > 0)
    const int i50 = find_threshold(opt.thresholds, 0.50);
    const int i95 = find_threshold(opt.thresholds, 0.95);
    summary.has_pair = i50 >= 0 && i95 >= 0;

    auto collect = [&](bool use_mask, int t_index) {
        std::vector<double> aps;
        for (const ClassEval& ce : summary.classes) {
            if (ce.n_gt == 0) continue;
            const auto& side = use_mask ? ce.mask : ce.box;
            if (side.empty()) continue;
            aps.push_back(side[static_cast<std::size_t>(t_index)].ap);
        }
        return aps;
    };
    auto mean_over_thresholds = [&](bool use_mask, const std::vector<int>& idxs) {
        std::vector<double> per_t;
        for (int ti : idxs) {
            const auto aps = collect(use_mask, ti);
            if (aps.empty()) return 0.0;
            per_t.push_back(mean_average_precision(aps));
        }
        return per_t.empty() ? 0.0 : mean_average_precision(per_t);
    };

    const bool any_gt =
        std::any_of(summary.classes.begin(), summary.classes.end(),
                    [](const ClassEval& c) { return c.n_gt > 0; });
    if (!any_gt) throw DomainError("no class has ground truth; mAP is undefined");

    std::vector<int> all_idx(opt.thresholds.size());
    std::iota(all_idx.begin(), all_idx.end(), 0);

    if (i50 >= 0) summary.map_box_50 = mean_over_thresholds(false, {i50});
    summary.map_box_range = mean_over_thresholds(false, all_idx);
    if (summary.has_pair) summary.map_box_pair = mean_over_thresholds(false, {i50, i95});

    summary.has_masks =
        std::any_of(summary.classes.begin(), summary.classes.end(),
                    [](const ClassEval& c) { return !c.mask.empty(); });
    if (summary.has_masks) {
        if (i50 >= 0) summary.map_mask_50 = mean_over_thresholds(true, {i50});
        summary.map_mask_range = mean_over_thresholds(true, all_idx);
        if (summary.has_pair)
            summary.map_mask_pair = mean_over_thresholds(true, {i50, i95});
    }

    summary.detection_rate_50 =
        dr_gt == 0 ? 0.0 : static_cast<double>(dr_tp) / static_cast<double>(dr_gt);
    if (dr_gt == 0) summary.recall_undefined_seen = true;
    return summary;
}

void write_eval_summary_json(const EvalSummary& summary,
                             const std::filesystem::path& path) {
    json j;
    j["thresholds"] = summary.thresholds;
    json classes = json::array();
    for (const ClassEval& ce : summary.classes) {
        json c;
        c["label"] = ce.label;
        c["n_gt"] = ce.n_gt;
        c["n_pred"] = ce.n_pred;
        json apb = json::object();
        for (const ThresholdEval& te : ce.box) apb[fmt2(te.threshold)] = te.ap;
        c["ap_box"] = apb;
        if (!ce.mask.empty()) {
            json apm = json::object();
            for (const ThresholdEval& te : ce.mask) apm[fmt2(te.threshold)] = te.ap;
            c["ap_mask"] = apm;
        } else {
            c["ap_mask"] = nullptr;
        }
        classes.push_back(std::move(c));
    }
    j["classes"] = classes;

    json mb;
    mb["at_050"] = summary.map_box_50;
    mb["range_050_095"] = summary.map_box_range;
    mb["pair_050_095"] = summary.has_pair ? json(summary.map_box_pair) : json(nullptr);
    j["map_box"] = mb;
    if (summary.has_masks) {
        json mm;
        mm["at_050"] = summary.map_mask_50;
        mm["range_050_095"] = summary.map_mask_range;
        mm["pair_050_095"] =
            summary.has_pair ? json(summary.map_mask_pair) : json(nullptr);
        j["map_mask"] = mm;
    } else {
        j["map_mask"] = nullptr;
    }
    j["detection_rate_50"] = summary.detection_rate_50;
    j["totals"] = {{"gt", summary.total_gt}, {"pred", summary.total_pred}};
    j["flags"] = {{"precision_undefined", summary.precision_undefined_seen},
                  {"recall_undefined", summary.recall_undefined_seen}};

    std::ofstream out(path);
    if (!out) throw IoError("cannot write evaluation summary: " + path.string());
    out << j.dump(2) << "\n";
}

void write_pr_curves_csv(const EvalSummary& summary,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write PR curves: " + path.string());
    out << "metric,label,iou_threshold,score,recall,precision\n";
    char line[256];
    auto dump_side = [&](const char* metric, const ClassEval& ce,
                         const std::vector<ThresholdEval>& side) {
        for (const ThresholdEval& te : side) {
            for (const PRPoint& pt : te.curve.points) {
                std::snprintf(line, sizeof line, "%s,%s,%.2f,%.17g,%.17g,%.17g\n",
                              metric, ce.label.c_str(), te.threshold, pt.score,
                              pt.recall, pt.precision);
                out << line;
            }
        }
    };
    for (const ClassEval& ce : summary.classes) {
        dump_side("box", ce, ce.box);
        dump_side("mask", ce, ce.mask);
    }
}

} // namespace canopy::metrics
