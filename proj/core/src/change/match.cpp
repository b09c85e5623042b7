#include "canopy/change/match.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "canopy/annot/labelme.hpp"
#include "canopy/change/assignment.hpp"
#include "canopy/geo/polygon.hpp"
#include "canopy/util/error.hpp"

namespace canopy::change {

const char* verdict_name(ChangeVerdict v) {
    switch (v) {
        case ChangeVerdict::persisted: return "persisted";
        case ChangeVerdict::gained: return "gained";
        case ChangeVerdict::lost: return "lost";
    }
    return "?";
}

MatchStrategy match_strategy_from_name(const std::string& name) {
    if (name == "greedy") return MatchStrategy::greedy;
    if (name == "optimal") return MatchStrategy::optimal;
    throw ConfigError("unknown match strategy '" + name + "' (expected greedy or optimal)");
}

namespace {

double centroid_dist(const detect::TreeInstance& a, const detect::TreeInstance& b) {
    return std::hypot(a.centroid_projected.x - b.centroid_projected.x,
                      a.centroid_projected.y - b.centroid_projected.y);
}

// earlier index -> later index, -1 where unmatched
std::vector<int> match_greedy(const detect::InstanceSet& earlier,
                              const detect::InstanceSet& later, double max_dist) {
    struct Candidate {
        double dist;
        int i, j;
    };
    std::vector<Candidate> candidates;
    const int n = static_cast<int>(earlier.instances.size());
    const int m = static_cast<int>(later.instances.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double d = centroid_dist(earlier.instances[i], later.instances[j]);
            if (d <= max_dist) candidates.push_back({d, i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                  return std::tie(a.dist, earlier.instances[a.i].id, later.instances[a.j].id,
                                  a.i, a.j) <
                         std::tie(b.dist, earlier.instances[b.i].id, later.instances[b.j].id,
                                  b.i, b.j);
              });
    std::vector<int> match(n, -1);
    std::vector<char> later_taken(m, 0);
    for (const Candidate& c : candidates) {
        if (match[c.i] != -1 || later_taken[c.j]) continue;
        match[c.i] = c.j;
        later_taken[c.j] = 1;
    }
    return match;
}

// Pads to (n+m) x (n+m): leaving any real instance unmatched costs kUnmatched,
// which exceeds every possible total of real distances, so the solver
// maximizes the number of matches before minimizing their total distance.
// Pairs beyond max_dist cost 3x that, i.e. worse than both staying unmatched.
std::vector<int> match_optimal(const detect::InstanceSet& earlier,
                               const detect::InstanceSet& later, double max_dist) {
    const int n = static_cast<int>(earlier.instances.size());
    const int m = static_cast<int>(later.instances.size());
    std::vector<int> match(n, -1);
    if (n == 0 || m == 0) return match;

    const double unmatched = (n + m) * max_dist + 1.0;
    const double forbidden = 3.0 * unmatched;
    raster::Grid<double> cost(n + m, n + m, 0.0);
    for (int i = 0; i < n + m; ++i) {
        for (int j = 0; j < n + m; ++j) {
            if (i < n && j < m) {
                const double d = centroid_dist(earlier.instances[i], later.instances[j]);
                cost.at(i, j) = d <= max_dist ? d : forbidden;
            } else if (i < n || j < m) {
                cost.at(i, j) = unmatched;
            }
        }
    }
    const std::vector<int> row_to_col = solve_assignment(cost);
    for (int i = 0; i < n; ++i) {
        const int j = row_to_col[i];
        if (j < m &&
            centroid_dist(earlier.instances[i], later.instances[j]) <= max_dist) {
            match[i] = j;
        }
    }
    return match;
}

std::vector<geo::Vec2> region_ring(const std::vector<geo::LonLat>& polygon) {
    std::vector<geo::Vec2> ring;
    ring.reserve(polygon.size());
    for (const geo::LonLat& p : polygon) ring.push_back({p.lon, p.lat});
    return ring;
}

void validate_region(const std::vector<geo::Vec2>& ring, const std::string& what) {
    const std::vector<geo::Vec2> distinct = annot::dedupe_vertices(ring);
    if (distinct.size() < 3) throw DomainError(what + " has fewer than 3 distinct vertices");
    if (!annot::polygon_is_simple(distinct))
        throw DomainError(what + " is self-intersecting");
}

namespace bg = boost::geometry;
using BoostPoint = bg::model::d2::point_xy<double>;
using BoostPolygon = bg::model::polygon<BoostPoint>;
using BoostMultiPolygon = bg::model::multi_polygon<BoostPolygon>;

BoostPolygon to_boost(const std::vector<geo::Vec2>& ring) {
    BoostPolygon poly;
    for (const geo::Vec2& p : ring) bg::append(poly.outer(), BoostPoint(p.x, p.y));
    if (!ring.empty()) bg::append(poly.outer(), BoostPoint(ring[0].x, ring[0].y));
    bg::correct(poly);
    return poly;
}

bool regions_overlap(const std::vector<geo::Vec2>& a, const std::vector<geo::Vec2>& b) {
    BoostMultiPolygon inter;
    try {
        bg::intersection(to_boost(a), to_boost(b), inter);
    } catch (const std::exception&) {
        return false;
    }
    return std::abs(bg::area(inter)) > 1e-15;
}

} // namespace

std::vector<ChangeRecord> match_epochs(const detect::InstanceSet& earlier,
                                       const detect::InstanceSet& later,
                                       const MatchOptions& opts) {
    if (!(opts.max_dist_m > 0.0))
        throw DomainError("max match distance must be positive");
    if (earlier.epsg != later.epsg)
        throw DomainError("epoch instance sets use different CRS (EPSG:" +
                                std::to_string(earlier.epsg) + " vs EPSG:" +
                                std::to_string(later.epsg) + ")");

    const std::vector<int> match = opts.strategy == MatchStrategy::greedy
                                       ? match_greedy(earlier, later, opts.max_dist_m)
                                       : match_optimal(earlier, later, opts.max_dist_m);

    const int n = static_cast<int>(earlier.instances.size());
    const int m = static_cast<int>(later.instances.size());
    std::vector<char> later_matched(m, 0);
    std::vector<ChangeRecord> records;
    records.reserve(static_cast<std::size_t>(n) + m);

    for (int i = 0; i < n; ++i) {
        if (match[i] == -1) continue;
        const detect::TreeInstance& a = earlier.instances[i];
        const detect::TreeInstance& b = later.instances[match[i]];
        later_matched[match[i]] = 1;
        ChangeRecord rec;
        rec.verdict = ChangeVerdict::persisted;
        rec.earlier_index = i;
        rec.later_index = match[i];
        rec.earlier_id = a.id;
        rec.later_id = b.id;
        rec.distance_m = centroid_dist(a, b);
        rec.area_delta_m2 = b.area_m2 - a.area_m2;
        records.push_back(std::move(rec));
    }
    for (int i = 0; i < n; ++i) {
        if (match[i] != -1) continue;
        ChangeRecord rec;
        rec.verdict = ChangeVerdict::lost;
        rec.earlier_index = i;
        rec.earlier_id = earlier.instances[i].id;
        records.push_back(std::move(rec));
    }
    for (int j = 0; j < m; ++j) {
        if (later_matched[j]) continue;
        ChangeRecord rec;
        rec.verdict = ChangeVerdict::gained;
        rec.later_index = j;
        rec.later_id = later.instances[j].id;
        records.push_back(std::move(rec));
    }
    return records;
}

TreeTally count_trees(const detect::InstanceSet& set, const std::vector<geo::LonLat>* region) {
    std::vector<geo::Vec2> ring;
    if (region) {
        ring = region_ring(*region);
        validate_region(ring, "region polygon");
    }
    TreeTally tally;
    for (const detect::TreeInstance& inst : set.instances) {
        if (region && !geo::point_in_polygon({inst.centroid.lon, inst.centroid.lat}, ring))
            continue;
        ++tally.count;
        tally.area_m2 += inst.area_m2;
    }
    return tally;
}

RegionReportResult region_report(const std::vector<ChangeRecord>& records,
                                 const detect::InstanceSet& earlier,
                                 const detect::InstanceSet& later,
                                 const std::vector<detect::RegionDef>& regions) {
    RegionReportResult result;

    std::vector<std::vector<geo::Vec2>> rings;
    rings.reserve(regions.size());
    for (const detect::RegionDef& r : regions) {
        rings.push_back(region_ring(r.polygon));
        validate_region(rings.back(), "region '" + r.id + "'");
    }
    for (std::size_t a = 0; a < rings.size(); ++a) {
        for (std::size_t b = a + 1; b < rings.size(); ++b) {
            if (regions_overlap(rings[a], rings[b])) {
                result.warnings.push_back("regions '" + regions[a].id + "' and '" +
                                          regions[b].id + "' overlap");
            }
        }
    }

    result.rows.resize(regions.size() + 1);
    result.rows[0].region_id = "scene";
    for (std::size_t r = 0; r < regions.size(); ++r) result.rows[r + 1].region_id = regions[r].id;

    auto add = [&](RegionReport& row, const ChangeRecord& rec) {
        switch (rec.verdict) {
            case ChangeVerdict::persisted: {
                ++row.persisted;
                const double earlier_area = earlier.instances[rec.earlier_index].area_m2;
                row.area_earlier_m2 += earlier_area;
                row.area_later_m2 += later.instances[rec.later_index].area_m2;
                break;
            }
            case ChangeVerdict::gained:
                ++row.gained;
                row.area_later_m2 += later.instances[rec.later_index].area_m2;
                break;
            case ChangeVerdict::lost:
                ++row.lost;
                row.area_earlier_m2 += earlier.instances[rec.earlier_index].area_m2;
                break;
        }
    };

    for (const ChangeRecord& rec : records) {
        add(result.rows[0], rec);
        const detect::TreeInstance& anchor = rec.verdict == ChangeVerdict::lost
                                                 ? earlier.instances[rec.earlier_index]
                                                 : later.instances[rec.later_index];
        const geo::Vec2 c{anchor.centroid.lon, anchor.centroid.lat};
        for (std::size_t r = 0; r < rings.size(); ++r) {
            if (geo::point_in_polygon(c, rings[r])) {
                add(result.rows[r + 1], rec);
                break;
            }
        }
    }

    for (RegionReport& row : result.rows) {
        row.count_earlier = row.persisted + row.lost;
        row.count_later = row.persisted + row.gained;
    }
    return result;
}

} // namespace canopy::change
