#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "canopy/geo/geotransform.hpp"
#include "canopy/geo/mercator.hpp"
#include "canopy/geo/polygon.hpp"
#include "canopy/geo/projection.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

#include "ref.hpp"

using namespace canopy;
using namespace canopy::geo;

namespace {

// survey extent of the evaluation scene (xMin yMin / xMax yMax corners)
constexpr double kExtW = 72.4587, kExtS = 22.9942, kExtE = 72.5716, kExtN = 23.0835;

} // namespace

TEST_CASE("lonlat_to_tile hand values") {
    // greenwich/equator sits in the south-east quadrant tile at zoom 1
    CHECK(lonlat_to_tile(0.0, 0.0, 1) == TileIndex{1, 1, 1});
    CHECK(lonlat_to_tile(-180.0, 0.0, 3).x == 0);
    CHECK(lonlat_to_tile(0.0, 0.0, 0) == TileIndex{0, 0, 0});
    CHECK(lonlat_to_tile(kExtW, kExtS, 18) == TileIndex{18, 183834, 113859});
}

TEST_CASE("survey extent tile counts at zoom 18 and 19") {
    const LonLatBox box{kExtW, kExtS, kExtE, kExtN};
    const TileRange r18 = tiles_covering(box, 18);
    CHECK(r18.x1 - r18.x0 + 1 == 84);
    CHECK(r18.y1 - r18.y0 + 1 == 71);
    CHECK(r18.count() == 5964);
    CHECK(tiles_covering(box, 19).count() == 23572);
}

TEST_CASE("tile_bounds of the world and of a quadrant") {
    const LonLatBox world = tile_bounds({0, 0, 0});
    CHECK(world.west == doctest::Approx(-180.0));
    CHECK(world.east == doctest::Approx(180.0));
    CHECK(world.north == doctest::Approx(85.0511287798066).epsilon(1e-12));
    CHECK(world.south == doctest::Approx(-85.0511287798066).epsilon(1e-12));

    const LonLatBox q = tile_bounds({1, 1, 1});
    CHECK(q.west == doctest::Approx(0.0));
    CHECK(q.east == doctest::Approx(180.0));
    CHECK(q.north == doctest::Approx(0.0));
    CHECK(q.south == doctest::Approx(-85.0511287798066).epsilon(1e-12));
}

TEST_CASE("latitudes beyond the mercator limit are rejected, never clamped") {
    CHECK_THROWS_AS(lonlat_to_tile(0.0, 85.06, 10), DomainError);
    CHECK_THROWS_AS(lonlat_to_tile(0.0, -85.06, 10), DomainError);
    CHECK_THROWS_AS(lonlat_to_tile(180.0, 0.0, 3), DomainError);
    CHECK_THROWS_AS(lonlat_to_tile(0.0, 0.0, -1), DomainError);
    // the exact southern limit folds into the last row instead of row 2^z
    CHECK(lonlat_to_tile(0.0, -85.05112878, 5).y == 31);
}

TEST_CASE("tile round trip: the source point lies inside its tile's bounds") {
    Rng rng(20260815);
    for (int i = 0; i < 10000; ++i) {
        const double lon = rng.uniform(-180.0, 180.0);
        const double lat = rng.uniform(-85.05, 85.05);
        const int zoom = static_cast<int>(rng.uniform_int(0, 19));
        const TileIndex t = lonlat_to_tile(lon, lat, zoom);
        CHECK(t.x >= 0);
        CHECK(t.x < (std::int64_t{1} << zoom));
        CHECK(t.y >= 0);
        CHECK(t.y < (std::int64_t{1} << zoom));
        const LonLatBox b = tile_bounds(t);
        REQUIRE(b.contains(lon, lat));
    }
}

TEST_CASE("adjacent tiles share edges bit-for-bit") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const int zoom = static_cast<int>(rng.uniform_int(1, 19));
        const std::int64_t n = std::int64_t{1} << zoom;
        const std::int64_t x = rng.uniform_int(0, n - 2);
        const std::int64_t y = rng.uniform_int(0, n - 2);
        CHECK(tile_bounds({zoom, x, y}).east == tile_bounds({zoom, x + 1, y}).west);
        CHECK(tile_bounds({zoom, x, y}).south == tile_bounds({zoom, x, y + 1}).north);
    }
}

TEST_CASE("tiles_covering rejects degenerate boxes") {
    CHECK_THROWS_AS(tiles_covering({10.0, 5.0, 10.0, 6.0}, 10), DomainError);
    CHECK_THROWS_AS(tiles_covering({10.0, 6.0, 11.0, 5.0}, 10), DomainError);
}

TEST_CASE("mercator forward and inverse") {
    const Vec2 o = lonlat_to_mercator(0.0, 0.0);
    CHECK(o.x == doctest::Approx(0.0));
    CHECK(o.y == doctest::Approx(0.0));
    CHECK(lonlat_to_mercator(180.0, 0.0).x == doctest::Approx(20037508.342789244));

    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double lon = rng.uniform(-179.9, 179.9);
        const double lat = rng.uniform(-85.0, 85.0);
        const Vec2 m = lonlat_to_mercator(lon, lat);
        const LonLat back = mercator_to_lonlat(m.x, m.y);
        CHECK(back.lon == doctest::Approx(lon).epsilon(1e-11));
        CHECK(back.lat == doctest::Approx(lat).epsilon(1e-11));
    }
}

TEST_CASE("tile span halves per zoom level") {
    CHECK(tile_span_m(0) == doctest::Approx(2.0 * 20037508.342789244));
    for (int z = 0; z < 19; ++z)
        CHECK(tile_span_m(z + 1) == doctest::Approx(tile_span_m(z) / 2.0));
}

TEST_CASE("tile pixel corners meet the mercator world corners") {
    const TileIndex world{0, 0, 0};
    const Vec2 tl = tile_pixel_to_mercator(world, 0.0, 0.0);
    const Vec2 br = tile_pixel_to_mercator(world, 512.0, 512.0);
    CHECK(tl.x == doctest::Approx(-20037508.342789244));
    CHECK(tl.y == doctest::Approx(20037508.342789244));
    CHECK(br.x == doctest::Approx(20037508.342789244));
    CHECK(br.y == doctest::Approx(-20037508.342789244));

    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const int zoom = static_cast<int>(rng.uniform_int(0, 19));
        const std::int64_t n = std::int64_t{1} << zoom;
        const TileIndex t{zoom, rng.uniform_int(0, n - 1), rng.uniform_int(0, n - 1)};
        const double px = rng.uniform(0.0, 512.0);
        const double py = rng.uniform(0.0, 512.0);
        const Vec2 m = tile_pixel_to_mercator(t, px, py);
        const Vec2 back = mercator_to_tile_pixel(t, m.x, m.y);
        CHECK(std::abs(back.x - px) < 1e-6);
        CHECK(std::abs(back.y - py) < 1e-6);
    }
}

TEST_CASE("geotransform identity and a hand example") {
    const GeoTransform ident;
    CHECK(ident.pixel_to_geo(3.0, 4.0).x == doctest::Approx(3.0));
    CHECK(ident.pixel_to_geo(3.0, 4.0).y == doctest::Approx(-4.0));

    const GeoTransform gt({100.0, 0.5, 0.0, 200.0, 0.0, -0.5});
    const Vec2 origin = gt.pixel_to_geo(0.0, 0.0);
    CHECK(origin.x == doctest::Approx(100.0));
    CHECK(origin.y == doctest::Approx(200.0));
    const Vec2 p = gt.pixel_to_geo(2.0, 4.0);
    CHECK(p.x == doctest::Approx(101.0));
    CHECK(p.y == doctest::Approx(198.0));
    CHECK(gt.pixel_width() == doctest::Approx(0.5));
    CHECK(gt.pixel_height() == doctest::Approx(-0.5));
    CHECK(gt.axis_aligned());
}

TEST_CASE("geotransform inversion round trip on random invertible transforms") {
    Rng rng(555);
    for (int i = 0; i < 10000; ++i) {
        std::array<double, 6> c{};
        do {
            c = {rng.uniform(-1e6, 1e6), rng.uniform(-10.0, 10.0),
                 rng.uniform(-10.0, 10.0), rng.uniform(-1e6, 1e6),
                 rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        } while (std::abs(c[1] * c[5] - c[2] * c[4]) < 0.5);
        const GeoTransform gt(c);
        const double col = rng.uniform(-1000.0, 1000.0);
        const double row = rng.uniform(-1000.0, 1000.0);
        const Vec2 g = gt.pixel_to_geo(col, row);
        const Vec2 back = gt.geo_to_pixel(g.x, g.y);
        CHECK(std::abs(back.x - col) < 1e-6);
        CHECK(std::abs(back.y - row) < 1e-6);

        // independent 2x2 inversion agrees (different arithmetic, so the
        // large offset terms cancel less cleanly: absolute pixel tolerance)
        const auto inv = ref::invert_geotransform(c);
        CHECK(std::abs(inv[0] + g.x * inv[1] + g.y * inv[2] - back.x) < 1e-5);
        CHECK(std::abs(inv[3] + g.x * inv[4] + g.y * inv[5] - back.y) < 1e-5);
    }
    CHECK_THROWS_AS(GeoTransform({0.0, 1.0, 2.0, 0.0, 2.0, 4.0}), DomainError);
}

TEST_CASE("utm zone selection and central meridians") {
    CHECK(utm_epsg_for({72.5, 23.0}) == 32643);
    CHECK(utm_epsg_for({72.5, -23.0}) == 32743);
    CHECK(utm_epsg_for({0.5, 51.0}) == 32631);
    CHECK(utm_central_meridian_deg(32643) == doctest::Approx(75.0));
    CHECK(utm_central_meridian_deg(32701) == doctest::Approx(-177.0));
}

TEST_CASE("supported EPSG codes") {
    CHECK(epsg_supported(4326));
    CHECK(epsg_supported(3857));
    CHECK(epsg_supported(32643));
    CHECK(epsg_supported(32743));
    CHECK(epsg_supported(32601));
    CHECK(epsg_supported(32760));
    CHECK_FALSE(epsg_supported(32661));
    CHECK_FALSE(epsg_supported(26917));
    CHECK_FALSE(epsg_name(32643).empty());
    CHECK_THROWS_AS(lonlat_to_projected(26917, {0.0, 0.0}), ConfigError);
}

TEST_CASE("projection passthrough and mercator agreement") {
    const LonLat p{72.51, 23.03};
    const Vec2 deg = lonlat_to_projected(4326, p);
    CHECK(deg.x == doctest::Approx(p.lon));
    CHECK(deg.y == doctest::Approx(p.lat));
    const Vec2 m = lonlat_to_projected(3857, p);
    const Vec2 m2 = lonlat_to_mercator(p.lon, p.lat);
    CHECK(m.x == doctest::Approx(m2.x));
    CHECK(m.y == doctest::Approx(m2.y));
}

TEST_CASE("utm northing on the central meridian matches the meridian arc") {
    // on the central meridian the scaled meridian arc is the exact northing
    for (double lat : {5.0, 23.0, 45.0, 60.0}) {
        const Vec2 p = lonlat_to_projected(32643, {75.0, lat});
        CHECK(std::abs(p.x - 500000.0) < 1e-6);
        CHECK(std::abs(p.y - 0.9996 * ref::meridian_arc_m(lat)) < 1e-3);
    }
    // southern hemisphere adds the false northing
    const Vec2 s = lonlat_to_projected(32743, {75.0, -23.0});
    CHECK(std::abs(s.x - 500000.0) < 1e-6);
    CHECK(std::abs(s.y - (10000000.0 - 0.9996 * ref::meridian_arc_m(23.0))) < 1e-3);
}

TEST_CASE("utm round trip within the zone") {
    Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        const double lon = rng.uniform(72.0, 78.0); // zone 43
        const double lat = rng.uniform(-80.0, 80.0);
        const int epsg = lat >= 0.0 ? 32643 : 32743;
        const Vec2 xy = lonlat_to_projected(epsg, {lon, lat});
        const LonLat back = projected_to_lonlat(epsg, xy);
        CHECK(std::abs(back.lon - lon) < 1e-9);
        CHECK(std::abs(back.lat - lat) < 1e-9);
    }
}

TEST_CASE("polygon area and centroid") {
    const std::vector<Vec2> ccw{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(polygon_signed_area(ccw) == doctest::Approx(1.0));
    const std::vector<Vec2> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    CHECK(polygon_signed_area(cw) == doctest::Approx(-1.0));
    const Vec2 c = polygon_centroid(ccw);
    CHECK(c.x == doctest::Approx(0.5));
    CHECK(c.y == doctest::Approx(0.5));

    // L-shape: area 3, centroid from the two-rectangle decomposition
    const std::vector<Vec2> ell{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK(polygon_signed_area(ell) == doctest::Approx(3.0));
    const Vec2 ec = polygon_centroid(ell);
    CHECK(ec.x == doctest::Approx((2.0 * 1.0 + 1.0 * 0.5) / 3.0));
    CHECK(ec.y == doctest::Approx((2.0 * 0.5 + 1.0 * 1.5) / 3.0));
}

TEST_CASE("area and centroid survive large coordinate offsets") {
    // UTM-scale offsets: the naive shoelace loses ~7 digits here
    const double ox = 2.5e6, oy = 4.4e6;
    const std::vector<Vec2> sq{{ox, oy}, {ox + 1, oy}, {ox + 1, oy + 1}, {ox, oy + 1}};
    CHECK(polygon_signed_area(sq) == doctest::Approx(1.0).epsilon(1e-9));
    const Vec2 c = polygon_centroid(sq);
    CHECK(std::abs(c.x - (ox + 0.5)) < 1e-6);
    CHECK(std::abs(c.y - (oy + 0.5)) < 1e-6);

    // translation invariance against the same ring at the origin
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        std::vector<Vec2> base;
        const int n = static_cast<int>(rng.uniform_int(3, 10));
        for (int k = 0; k < n; ++k) {
            const double ang = 2.0 * 3.14159265358979323846 * k / n;
            const double r = rng.uniform(0.5, 4.0);
            base.push_back({r * std::cos(ang), r * std::sin(ang)});
        }
        std::vector<Vec2> moved = base;
        for (Vec2& p : moved) {
            p.x += ox;
            p.y += oy;
        }
        CHECK(std::abs(polygon_signed_area(moved) - polygon_signed_area(base)) < 1e-7);
        const Vec2 c0 = polygon_centroid(base);
        const Vec2 c1 = polygon_centroid(moved);
        CHECK(std::abs(c1.x - ox - c0.x) < 1e-7);
        CHECK(std::abs(c1.y - oy - c0.y) < 1e-7);
    }
}

TEST_CASE("polygon bounds") {
    const std::vector<Vec2> tri{{1, 5}, {4, 2}, {7, 9}};
    const Bounds b = polygon_bounds(tri);
    CHECK(b.minx == doctest::Approx(1.0));
    CHECK(b.miny == doctest::Approx(2.0));
    CHECK(b.maxx == doctest::Approx(7.0));
    CHECK(b.maxy == doctest::Approx(9.0));
    CHECK(b.width() == doctest::Approx(6.0));
    CHECK(b.height() == doctest::Approx(7.0));
}

TEST_CASE("point_in_polygon half-open edge rule") {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(point_in_polygon({0.5, 0.5}, sq));
    CHECK_FALSE(point_in_polygon({1.5, 0.5}, sq));
    CHECK(point_in_polygon({0.0, 0.5}, sq));       // left edge in
    CHECK_FALSE(point_in_polygon({1.0, 0.5}, sq)); // right edge out
    CHECK(point_in_polygon({0.5, 0.0}, sq));       // top edge in
    CHECK_FALSE(point_in_polygon({0.5, 1.0}, sq)); // bottom edge out
}

TEST_CASE("point_in_polygon agrees with the independent crossing test") {
    Rng rng(1234);
    for (int i = 0; i < 100; ++i) {
        std::vector<Vec2> poly;
        std::vector<ref::Pt> rpoly;
        const int n = static_cast<int>(rng.uniform_int(3, 9));
        for (int k = 0; k < n; ++k) {
            const double ang = 2.0 * 3.14159265358979323846 * k / n;
            const double r = rng.uniform(1.0, 8.0);
            const double x = 10.0 + r * std::cos(ang);
            const double y = 10.0 + r * std::sin(ang);
            poly.push_back({x, y});
            rpoly.push_back({x, y});
        }
        for (int q = 0; q < 100; ++q) {
            const double px = rng.uniform(0.0, 20.0);
            const double py = rng.uniform(0.0, 20.0);
            CHECK(point_in_polygon({px, py}, poly) ==
                  ref::point_in_polygon(px, py, rpoly));
        }
    }
}

TEST_CASE("clip_polygon_box") {
    const std::vector<Vec2> sq{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    const auto half = clip_polygon_box(sq, 0.0, 0.0, 1.0, 2.0);
    REQUIRE(half.size() >= 3);
    CHECK(std::abs(polygon_signed_area(half)) == doctest::Approx(2.0));
    const auto gone = clip_polygon_box(sq, 5.0, 5.0, 6.0, 6.0);
    CHECK(gone.size() < 3);
}

TEST_CASE("rasterized polygon area and pair IoU") {
    const std::vector<Vec2> unit{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(rasterized_area(unit, 0.1) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<Vec2> circle;
    for (int k = 0; k < 64; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / 64;
        circle.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
    }
    CHECK(rasterized_area(circle, 0.1) ==
          doctest::Approx(3.14159265358979323846 * 4.0).epsilon(0.02));

    const std::vector<Vec2> a{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    const std::vector<Vec2> b{{5, 0}, {15, 0}, {15, 10}, {5, 10}};
    CHECK(rasterized_pair_iou(a, b, 0.1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(rasterized_pair_iou(a, a, 0.1) == doctest::Approx(1.0));
    const std::vector<Vec2> far{{100, 100}, {101, 100}, {101, 101}, {100, 101}};
    CHECK(rasterized_pair_iou(a, far, 0.1) == doctest::Approx(0.0));
}
