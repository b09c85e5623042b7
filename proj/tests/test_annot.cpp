#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "canopy/annot/labelme.hpp"
#include "canopy/annot/mask.hpp"
#include "canopy/annot/split.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

#include "ref.hpp"

using namespace canopy;
using namespace canopy::annot;
namespace fs = std::filesystem;

namespace {

fs::path data_file(const char* name) {
    return fs::path(CANOPY_TEST_DATA_DIR) / name;
}

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("canopy_annot_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// star-shaped (hence simple) polygon around (cx, cy)
std::vector<geo::Vec2> random_star(Rng& rng, double cx, double cy, double rmax,
                                   int min_pts = 3, int max_pts = 12) {
    const int n = static_cast<int>(rng.uniform_int(min_pts, max_pts));
    std::vector<geo::Vec2> poly;
    for (int k = 0; k < n; ++k) {
        const double ang = 2.0 * 3.14159265358979323846 * (k + rng.uniform(0.05, 0.95)) /
                           n;
        const double r = rng.uniform(rmax * 0.2, rmax);
        poly.push_back({cx + r * std::cos(ang), cy + r * std::sin(ang)});
    }
    return poly;
}

} // namespace

TEST_CASE("annotation document fixture parses shape by shape") {
    const auto res = parse_annotation_file(data_file("annotations_sample.json"), {});

    REQUIRE(res.annotations.size() == 2);
    const PolygonAnnotation& tri = res.annotations[0];
    CHECK(tri.label == "tree");
    CHECK(tri.image_id == "18/183834/113859.png");
    REQUIRE(tri.points.size() == 3);
    CHECK(tri.points[0].x == 10.0);
    CHECK(tri.points[0].y == 10.0);
    CHECK(tri.points[1].x == 40.0);
    CHECK(tri.points[1].y == 12.0);
    CHECK(tri.points[2].x == 25.0);
    CHECK(tri.points[2].y == 44.0);

    // closing vertex dropped, square kept as an open 4-ring
    const PolygonAnnotation& sq = res.annotations[1];
    REQUIRE(sq.points.size() == 4);
    CHECK(sq.points[0].x == 100.0);
    CHECK(sq.points[3].y == 150.0);

    REQUIRE(res.rejected.size() == 3);
    CHECK(res.rejected[0].shape_index == 2); // bowtie
    CHECK(res.rejected[0].reason.find("self-intersect") != std::string::npos);
    CHECK(res.rejected[1].shape_index == 3); // vertex at 530 > 512
    CHECK(res.rejected[1].reason.find("outside") != std::string::npos);
    CHECK(res.rejected[2].shape_index == 4); // two points
    CHECK(res.rejected[2].reason.find("points") != std::string::npos);

    CHECK(res.non_polygon_warnings == 1); // the rectangle shape
    CHECK(res.label_filtered == 1);       // the building polygon
}

TEST_CASE("empty label filter keeps every label") {
    AnnotationParseOptions opt;
    opt.label_filter.clear();
    const auto res = parse_annotation_file(data_file("annotations_sample.json"), opt);
    CHECK(res.annotations.size() == 3);
    CHECK(res.label_filtered == 0);
    CHECK(res.annotations[2].label == "building");
}

TEST_CASE("malformed JSON raises a parse error with position info") {
    CHECK_THROWS_AS(parse_annotation_document("{ not json", "broken.json", {}),
                    ParseError);
    CHECK_THROWS_AS(parse_annotation_document("[1, 2]", "arr.json", {}), ParseError);
}

TEST_CASE("document without shapes parses to an empty result") {
    const auto res = parse_annotation_document(R"({"imagePath": "x.png"})", "x.json", {});
    CHECK(res.annotations.empty());
    CHECK(res.rejected.empty());
}

TEST_CASE("dedupe_vertices removes consecutive duplicates and the closing vertex") {
    const std::vector<geo::Vec2> in{{0, 0}, {0, 0}, {5, 0}, {5, 5}, {5, 5}, {0, 5}, {0, 0}};
    const auto out = dedupe_vertices(in);
    REQUIRE(out.size() == 4);
    CHECK(out[0].x == 0.0);
    CHECK(out[1].x == 5.0);
    CHECK(out[3].y == 5.0);
    // idempotent
    CHECK(dedupe_vertices(out).size() == 4);
}

TEST_CASE("polygon_is_simple") {
    CHECK(polygon_is_simple({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK_FALSE(polygon_is_simple({{0, 0}, {10, 10}, {10, 0}, {0, 10}})); // bowtie
    // vertex touching a non-adjacent edge counts as non-simple
    CHECK_FALSE(polygon_is_simple({{0, 0}, {10, 0}, {10, 10}, {5, 0}, {0, 10}}));
}

TEST_CASE("list_annotation_files returns json files sorted by name") {
    const fs::path dir = temp_dir("list");
    std::ofstream(dir / "b.json") << "{}";
    std::ofstream(dir / "a.json") << "{}";
    std::ofstream(dir / "c.txt") << "x";
    const auto files = list_annotation_files(dir);
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "a.json");
    CHECK(files[1].filename() == "b.json");
}

TEST_CASE("axis-aligned square fills exactly its pixel area") {
    const auto grid =
        fill_polygon({{0, 0}, {10, 0}, {10, 10}, {0, 10}}, 20, 20);
    CHECK(mask_area(grid) == 100);
    CHECK(grid.at(0, 0) == 1);
    CHECK(grid.at(9, 9) == 1);
    CHECK(grid.at(10, 10) == 0); // centers at 10.5 are outside
}

TEST_CASE("whole-tile polygon fills the whole tile") {
    const auto grid =
        fill_polygon({{0, 0}, {512, 0}, {512, 512}, {0, 512}}, 512, 512);
    CHECK(mask_area(grid) == 512 * 512);
}

TEST_CASE("right triangle fill matches the per-pixel scan") {
    const int n = 10;
    const std::vector<geo::Vec2> tri{{0, 0}, {double(n), 0}, {0, double(n)}};
    const auto grid = fill_polygon(tri, n, n);
    CHECK(mask_area(grid) == n * (n - 1) / 2);
    const auto oracle =
        ref::fill_polygon({{0, 0}, {double(n), 0}, {0, double(n)}}, n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            CHECK(grid.at(r, c) == oracle[static_cast<std::size_t>(r) * n + c]);
}

TEST_CASE("fill_polygon equals the point-in-polygon oracle on random polygons") {
    Rng rng(808);
    for (int trial = 0; trial < 40; ++trial) {
        const auto poly = random_star(rng, rng.uniform(10.0, 54.0),
                                      rng.uniform(10.0, 54.0), 9.0);
        std::vector<ref::Pt> rpoly;
        for (const auto& p : poly) rpoly.push_back({p.x, p.y});
        const auto grid = fill_polygon(poly, 64, 64);
        const auto oracle = ref::fill_polygon(rpoly, 64, 64);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c)
                REQUIRE(grid.at(r, c) == oracle[static_cast<std::size_t>(r) * 64 + c]);
    }
}

TEST_CASE("shared edges never double-fill") {
    // two rectangles sharing the x=8 edge partition their union
    const auto left = fill_polygon({{0, 0}, {8, 0}, {8, 16}, {0, 16}}, 16, 16);
    const auto right = fill_polygon({{8, 0}, {16, 0}, {16, 16}, {8, 16}}, 16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c)
            CHECK(left.at(r, c) + right.at(r, c) == 1);
}

TEST_CASE("polygon_to_mask carries area and id, rejects zero coverage") {
    const InstanceMask m =
        polygon_to_mask({{1, 1}, {5, 1}, {5, 5}, {1, 5}}, 10, 10, "18/1/2");
    CHECK(m.area == 16);
    CHECK(m.image_id == "18/1/2");
    CHECK(m.grid.width() == 10);
    // sliver between pixel centers covers nothing
    CHECK_THROWS_AS(polygon_to_mask({{0.6, 0.6}, {0.9, 0.6}, {0.9, 0.9}}, 10, 10),
                    DomainError);
}

TEST_CASE("split hand examples: 10 and 9 ids at 70/20/10") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("img" + std::to_string(i));
    const DatasetSplit ten = split_dataset(ids, {0.7, 0.2, 0.1}, 7);
    CHECK(ten.train.size() == 7);
    CHECK(ten.val.size() == 2);
    CHECK(ten.test.size() == 1);

    ids.pop_back();
    // floors give (6,1,0); the two leftovers go to train then val
    const DatasetSplit nine = split_dataset(ids, {0.7, 0.2, 0.1}, 7);
    CHECK(nine.train.size() == 7);
    CHECK(nine.val.size() == 2);
    CHECK(nine.test.size() == 0);
}

TEST_CASE("split is a partition, deterministic, and input-order independent") {
    Rng rng(2211);
    std::vector<std::string> ids;
    for (int i = 0; i < 57; ++i) ids.push_back("tile_" + std::to_string(i * 13));

    const DatasetSplit a = split_dataset(ids, {0.7, 0.2, 0.1}, 99);
    std::vector<std::string> shuffled = ids;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1],
                  shuffled[static_cast<std::size_t>(
                      rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
    const DatasetSplit b = split_dataset(shuffled, {0.7, 0.2, 0.1}, 99);
    CHECK(a.train == b.train);
    CHECK(a.val == b.val);
    CHECK(a.test == b.test);

    std::set<std::string> all(ids.begin(), ids.end());
    std::set<std::string> seen;
    for (const auto* bucket : {&a.train, &a.val, &a.test})
        for (const std::string& id : *bucket) {
            CHECK(all.count(id) == 1);
            CHECK(seen.insert(id).second); // no duplicates across buckets
        }
    CHECK(seen == all);

    const DatasetSplit c = split_dataset(ids, {0.7, 0.2, 0.1}, 100);
    CHECK(a.train != c.train); // a different seed reshuffles
}

TEST_CASE("split buckets stay within one element of their exact share") {
    Rng rng(31337);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 200));
        std::vector<std::string> ids;
        for (int i = 0; i < n; ++i)
            ids.push_back("id" + std::to_string(rng.next_u64()));
        const std::array<double, 3> ratios{0.7, 0.2, 0.1};
        const DatasetSplit s = split_dataset(ids, ratios, rng.next_u64());
        CHECK(s.train.size() + s.val.size() + s.test.size() == ids.size());
        CHECK(std::abs(double(s.train.size()) - 0.7 * n) <= 1.0);
        CHECK(std::abs(double(s.val.size()) - 0.2 * n) <= 1.0);
        CHECK(std::abs(double(s.test.size()) - 0.1 * n) <= 1.0);
    }
}

TEST_CASE("split input validation") {
    CHECK_THROWS_AS(split_dataset({}, {0.7, 0.2, 0.1}, 1), DomainError);
    CHECK_THROWS_AS(split_dataset({"a"}, {0.5, 0.2, 0.1}, 1), DomainError);
    CHECK_THROWS_AS(split_dataset({"a"}, {1.2, -0.1, -0.1}, 1), DomainError);
}
