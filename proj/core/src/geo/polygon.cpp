#include "canopy/geo/polygon.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/util/error.hpp"

namespace canopy::geo {

// Both shoelace sums run on coordinates shifted to the first vertex: with
// projected inputs millions of meters from the CRS origin the raw cross
// products are ~1e11 and their cancellation costs meters of precision;
// area and centroid are translation-invariant, so the shift is free.
double polygon_signed_area(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return 0.0;
    const Vec2 o = poly[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a{poly[i].x - o.x, poly[i].y - o.y};
        const Vec2 b{poly[(i + 1) % n].x - o.x, poly[(i + 1) % n].y - o.y};
        acc += a.x * b.y - b.x * a.y;
    }
    return acc / 2.0;
}

Vec2 polygon_centroid(std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    if (n == 0) throw DomainError("centroid of an empty polygon");
    const Vec2 o = poly[0];
    const double area = polygon_signed_area(poly);
    if (area == 0.0) {
        Vec2 mean;
        for (const Vec2& p : poly) {
            mean.x += p.x - o.x;
            mean.y += p.y - o.y;
        }
        return {o.x + mean.x / static_cast<double>(n),
                o.y + mean.y / static_cast<double>(n)};
    }
    Vec2 c;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a{poly[i].x - o.x, poly[i].y - o.y};
        const Vec2 b{poly[(i + 1) % n].x - o.x, poly[(i + 1) % n].y - o.y};
        const double cross = a.x * b.y - b.x * a.y;
        c.x += (a.x + b.x) * cross;
        c.y += (a.y + b.y) * cross;
    }
    return {o.x + c.x / (6.0 * area), o.y + c.y / (6.0 * area)};
}

Bounds polygon_bounds(std::span<const Vec2> poly) {
    if (poly.empty()) throw DomainError("bounds of an empty polygon");
    Bounds b{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
    for (const Vec2& p : poly) {
        b.minx = std::min(b.minx, p.x);
        b.miny = std::min(b.miny, p.y);
        b.maxx = std::max(b.maxx, p.x);
        b.maxy = std::max(b.maxy, p.y);
    }
    return b;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> poly) {
    const std::size_t n = poly.size();
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double cross_x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (cross_x > p.x) inside = !inside;
        }
    }
    return inside;
}

std::vector<Vec2> clip_polygon_box(std::span<const Vec2> poly, double minx,
                                   double miny, double maxx, double maxy) {
    std::vector<Vec2> current(poly.begin(), poly.end());

    // inside predicates and segment/edge intersections for the four box sides
    enum Side { left, right, bottom, top };
    auto is_inside = [&](Side s, const Vec2& p) {
        switch (s) {
            case left: return p.x >= minx;
            case right: return p.x <= maxx;
            case bottom: return p.y >= miny;
            case top: return p.y <= maxy;
        }
        return false;
    };
    auto intersect = [&](Side s, const Vec2& a, const Vec2& b) {
        Vec2 r;
        double t;
        switch (s) {
            case left:
                t = (minx - a.x) / (b.x - a.x);
                return Vec2{minx, a.y + t * (b.y - a.y)};
            case right:
                t = (maxx - a.x) / (b.x - a.x);
                return Vec2{maxx, a.y + t * (b.y - a.y)};
            case bottom:
                t = (miny - a.y) / (b.y - a.y);
                return Vec2{a.x + t * (b.x - a.x), miny};
            case top:
                t = (maxy - a.y) / (b.y - a.y);
                return Vec2{a.x + t * (b.x - a.x), maxy};
        }
        return r;
    };

    for (Side s : {left, right, bottom, top}) {
        if (current.size() < 3) break;
        std::vector<Vec2> next;
        next.reserve(current.size() + 4);
        for (std::size_t i = 0; i < current.size(); ++i) {
            const Vec2& a = current[i];
            const Vec2& b = current[(i + 1) % current.size()];
            const bool a_in = is_inside(s, a);
            const bool b_in = is_inside(s, b);
            if (a_in && b_in) {
                next.push_back(b);
            } else if (a_in && !b_in) {
                next.push_back(intersect(s, a, b));
            } else if (!a_in && b_in) {
                next.push_back(intersect(s, a, b));
                next.push_back(b);
            }
        }
        current = std::move(next);
    }

    // collapse duplicates the clipping may have introduced
    std::vector<Vec2> out;
    for (const Vec2& p : current) {
        if (!out.empty() && out.back().x == p.x && out.back().y == p.y) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && out.front().x == out.back().x &&
           out.front().y == out.back().y)
        out.pop_back();
    return out;
}

namespace {

// cell-center even-odd sampling over an explicit origin/size window
void sample_polygon(std::span<const Vec2> poly, double ox, double oy, double cell,
                    int nx, int ny, std::vector<char>& hits) {
    hits.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int r = 0; r < ny; ++r) {
        const double y = oy + (r + 0.5) * cell;
        for (int c = 0; c < nx; ++c) {
            const double x = ox + (c + 0.5) * cell;
            hits[static_cast<std::size_t>(r) * nx + c] =
                point_in_polygon({x, y}, poly);
        }
    }
}

} // namespace

double rasterized_pair_iou(std::span<const Vec2> a, std::span<const Vec2> b,
                           double cell) {
    if (!(cell > 0.0)) throw DomainError("rasterization cell must be > 0");
    const Bounds ba = polygon_bounds(a);
    const Bounds bb = polygon_bounds(b);
    const double minx = std::min(ba.minx, bb.minx) - cell;
    const double miny = std::min(ba.miny, bb.miny) - cell;
    const double maxx = std::max(ba.maxx, bb.maxx) + cell;
    const double maxy = std::max(ba.maxy, bb.maxy) + cell;
    const int nx = static_cast<int>(std::ceil((maxx - minx) / cell));
    const int ny = static_cast<int>(std::ceil((maxy - miny) / cell));
    if (nx <= 0 || ny <= 0) return 0.0;
    if (static_cast<std::int64_t>(nx) * ny > 64 * 1024 * 1024)
        throw DomainError("rasterized IoU window too large; increase cell size");

    std::vector<char> ha, hb;
    sample_polygon(a, minx, miny, cell, nx, ny, ha);
    sample_polygon(b, minx, miny, cell, nx, ny, hb);
    std::int64_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < ha.size(); ++i) {
        inter += ha[i] && hb[i];
        uni += ha[i] || hb[i];
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double rasterized_area(std::span<const Vec2> poly, double cell) {
    if (!(cell > 0.0)) throw DomainError("rasterization cell must be > 0");
    const Bounds b = polygon_bounds(poly);
    const double minx = b.minx - cell;
    const double miny = b.miny - cell;
    const int nx = static_cast<int>(std::ceil((b.maxx + cell - minx) / cell));
    const int ny = static_cast<int>(std::ceil((b.maxy + cell - miny) / cell));
    if (static_cast<std::int64_t>(nx) * ny > 64 * 1024 * 1024)
        throw DomainError("rasterized area window too large; increase cell size");
    std::vector<char> hits;
    sample_polygon(poly, minx, miny, cell, nx, ny, hits);
    std::int64_t count = 0;
    for (char h : hits) count += h != 0;
    return static_cast<double>(count) * cell * cell;
}

} // namespace canopy::geo
