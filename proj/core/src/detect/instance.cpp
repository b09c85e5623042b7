#include "canopy/detect/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "canopy/geo/polygon.hpp"
#include "canopy/geo/projection.hpp"
#include "canopy/util/error.hpp"

namespace canopy::detect {

namespace bg = boost::geometry;
using BoostPoint = bg::model::d2::point_xy<double>;
using BoostPolygon = bg::model::polygon<BoostPoint>;
using BoostMultiPolygon = bg::model::multi_polygon<BoostPolygon>;

namespace {

constexpr double kDedupeCellM = 0.1;

BoostPolygon to_boost(std::span<const geo::Vec2> ring) {
    BoostPolygon poly;
    for (const geo::Vec2& p : ring) bg::append(poly.outer(), BoostPoint(p.x, p.y));
    if (!ring.empty()) bg::append(poly.outer(), BoostPoint(ring[0].x, ring[0].y));
    bg::correct(poly);
    return poly;
}

std::vector<geo::Vec2> from_boost_outer(const BoostPolygon& poly) {
    std::vector<geo::Vec2> out;
    const auto& ring = poly.outer();
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) // ring is closed
        out.push_back({bg::get<0>(ring[i]), bg::get<1>(ring[i])});
    return out;
}

struct WorkInstance {
    std::vector<geo::Vec2> proj; // projected outline
    double score = 0.0;
    double area_m2 = 0.0;
    geo::Bounds bounds;
};

bool bounds_overlap(const geo::Bounds& a, const geo::Bounds& b) {
    return a.minx <= b.maxx && b.minx <= a.maxx && a.miny <= b.maxy &&
           b.miny <= a.maxy;
}

// union outline + exact planar area; falls back to the higher-score outline
// when the inputs are too broken for a boolean op
void merge_pair(WorkInstance& into, const WorkInstance& other) {
    const WorkInstance& winner = into.score >= other.score ? into : other;
    BoostMultiPolygon result;
    bool ok = true;
    try {
        bg::union_(to_boost(into.proj), to_boost(other.proj), result);
    } catch (...) {
        ok = false;
    }
    if (ok && !result.empty()) {
        // largest component's outer ring carries the merged outline
        std::size_t best = 0;
        double best_area = -1.0;
        for (std::size_t i = 0; i < result.size(); ++i) {
            const double a = bg::area(result[i]);
            if (a > best_area) {
                best_area = a;
                best = i;
            }
        }
        double total_area = 0.0;
        for (const BoostPolygon& p : result) total_area += bg::area(p);

        into.proj = from_boost_outer(result[best]);
        into.area_m2 = total_area;
    } else {
        into.proj = winner.proj;
        into.area_m2 = winner.area_m2;
    }
    into.score = std::max(into.score, other.score);
    into.bounds = geo::polygon_bounds(into.proj);
}

} // namespace

std::vector<geo::Vec2> projected_polygon(const TreeInstance& inst, int epsg) {
    std::vector<geo::Vec2> out;
    out.reserve(inst.polygon.size());
    for (const geo::LonLat& p : inst.polygon)
        out.push_back(geo::lonlat_to_projected(epsg, p));
    return out;
}

TreeInstance georeference(const Detection& d, int epsg, const std::string& epoch) {
    TreeInstance inst;
    inst.score = d.score;
    inst.epoch = epoch;

    std::vector<geo::Vec2> proj;
    proj.reserve(d.polygon.size());
    for (const geo::Vec2& px : d.polygon) {
        const geo::Vec2 m = geo::tile_pixel_to_mercator(d.tile, px.x, px.y);
        const geo::LonLat ll = geo::mercator_to_lonlat(m.x, m.y);
        inst.polygon.push_back(ll);
        proj.push_back(geo::lonlat_to_projected(epsg, ll));
    }

    const double area = std::abs(geo::polygon_signed_area(proj));
    if (!(area > 0.0))
        throw DomainError("detection polygon has zero area after georeferencing (tile " +
                          d.tile_str + ")");
    inst.area_m2 = area;
    inst.centroid_projected = geo::polygon_centroid(proj);
    inst.centroid = geo::projected_to_lonlat(epsg, inst.centroid_projected);
    return inst;
}

InstanceSet assemble_scene(const InstanceSet& input, double dedupe_iou) {
    if (!(dedupe_iou > 0.0 && dedupe_iou <= 1.0))
        throw DomainError("dedupe IoU threshold must be in (0, 1]");
    for (const TreeInstance& inst : input.instances)
        if (inst.epoch != input.epoch)
            throw DomainError("assemble_scene requires a single epoch; found \"" +
                              inst.epoch + "\" and \"" + input.epoch + "\"");

    // deterministic processing order: west-most, then south-most, then score
    std::vector<int> order(input.instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<geo::Bounds> lonlat_bounds(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::vector<geo::Vec2> ring;
        ring.reserve(input.instances[i].polygon.size());
        for (const geo::LonLat& p : input.instances[i].polygon)
            ring.push_back({p.lon, p.lat});
        lonlat_bounds[i] = geo::polygon_bounds(ring);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const geo::Bounds& ba = lonlat_bounds[a];
        const geo::Bounds& bb = lonlat_bounds[b];
        if (ba.minx != bb.minx) return ba.minx < bb.minx;
        if (ba.miny != bb.miny) return ba.miny < bb.miny;
        if (input.instances[a].score != input.instances[b].score)
            return input.instances[a].score > input.instances[b].score;
        return a < b;
    });

    std::vector<WorkInstance> work;
    work.reserve(order.size());
    for (int idx : order) {
        const TreeInstance& inst = input.instances[idx];
        WorkInstance w;
        w.proj = projected_polygon(inst, input.epsg);
        w.score = inst.score;
        w.area_m2 = inst.area_m2;
        w.bounds = geo::polygon_bounds(w.proj);
        work.push_back(std::move(w));
    }

    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t i = 0; i < work.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < work.size() && !merged; ++j) {
                if (!bounds_overlap(work[i].bounds, work[j].bounds)) continue;
                const double iou =
                    geo::rasterized_pair_iou(work[i].proj, work[j].proj, kDedupeCellM);
                if (iou >= dedupe_iou) {
                    merge_pair(work[i], work[j]);
                    work.erase(work.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                }
            }
        }
    }

    InstanceSet out;
    out.epsg = input.epsg;
    out.epoch = input.epoch;
    out.instances.reserve(work.size());
    for (const WorkInstance& w : work) {
        TreeInstance inst;
        inst.score = w.score;
        inst.epoch = input.epoch;
        inst.area_m2 = w.area_m2;
        inst.centroid_projected = geo::polygon_centroid(w.proj);
        inst.centroid = geo::projected_to_lonlat(input.epsg, inst.centroid_projected);
        inst.polygon.reserve(w.proj.size());
        for (const geo::Vec2& p : w.proj)
            inst.polygon.push_back(geo::projected_to_lonlat(input.epsg, p));
        out.instances.push_back(std::move(inst));
    }
    assign_instance_ids(out);
    return out;
}

void assign_instance_ids(InstanceSet& set) {
    std::vector<int> order(set.instances.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::vector<geo::Bounds> bounds(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::vector<geo::Vec2> ring;
        ring.reserve(set.instances[i].polygon.size());
        for (const geo::LonLat& p : set.instances[i].polygon)
            ring.push_back({p.lon, p.lat});
        bounds[i] = geo::polygon_bounds(ring);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (bounds[a].minx != bounds[b].minx) return bounds[a].minx < bounds[b].minx;
        if (bounds[a].miny != bounds[b].miny) return bounds[a].miny < bounds[b].miny;
        if (set.instances[a].score != set.instances[b].score)
            return set.instances[a].score > set.instances[b].score;
        return a < b;
    });

    std::vector<TreeInstance> sorted;
    sorted.reserve(order.size());
    for (std::size_t seq = 0; seq < order.size(); ++seq) {
        TreeInstance inst = std::move(set.instances[order[seq]]);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04zu", seq + 1);
        inst.id = set.epoch + "-" + buf;
        sorted.push_back(std::move(inst));
    }
    set.instances = std::move(sorted);
}

} // namespace canopy::detect
