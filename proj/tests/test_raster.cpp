#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "canopy/geo/scene.hpp"
#include "canopy/raster/png.hpp"
#include "canopy/raster/stretch.hpp"
#include "canopy/raster/tiler.hpp"
#include "canopy/util/error.hpp"
#include "canopy/util/hash.hpp"
#include "canopy/util/rng.hpp"

#include "ref.hpp"

using namespace canopy;
using namespace canopy::raster;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("canopy_raster_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// scene in EPSG:3857 whose pixel grid is exactly the tile grid at `zoom`,
// anchored at tile (x0, y0), covering tiles_x by tiles_y tiles
geo::SceneRaster aligned_scene(int zoom, std::int64_t x0, std::int64_t y0,
                               int tiles_x, int tiles_y, std::uint64_t salt) {
    geo::SceneRaster s;
    s.desc.width = 512 * tiles_x;
    s.desc.height = 512 * tiles_y;
    s.desc.bands = 1;
    s.desc.dtype = geo::SampleType::u8;
    s.desc.epsg = 3857;
    s.desc.date = "2011-05-01";
    s.desc.gsd_m = 0.5;
    const geo::Vec2 nw = geo::tile_pixel_to_mercator({zoom, x0, y0}, 0.0, 0.0);
    const double res = geo::tile_span_m(zoom) / 512.0;
    s.desc.transform = geo::GeoTransform({nw.x, res, 0.0, nw.y, 0.0, -res});
    s.samples.resize(static_cast<std::size_t>(s.desc.width) * s.desc.height);
    for (int r = 0; r < s.desc.height; ++r)
        for (int c = 0; c < s.desc.width; ++c)
            s.samples[static_cast<std::size_t>(r) * s.desc.width + c] =
                static_cast<std::uint16_t>(hash01(r, c, 0, salt) * 255.0);
    return s;
}

std::vector<std::uint16_t> raw_tile_samples(const fs::path& raw) {
    const auto bytes = read_bytes(raw);
    REQUIRE(bytes.size() % 2 == 0);
    std::vector<std::uint16_t> out(bytes.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint16_t>(bytes[2 * i] | (bytes[2 * i + 1] << 8));
    return out;
}

} // namespace

TEST_CASE("percentile interpolation") {
    std::vector<std::uint16_t> one{7};
    CHECK(percentile(one, 0.0) == doctest::Approx(7.0));
    CHECK(percentile(one, 100.0) == doctest::Approx(7.0));

    std::vector<std::uint16_t> four{4, 1, 3, 2}; // unsorted on purpose
    CHECK(percentile(four, 0.0) == doctest::Approx(1.0));
    CHECK(percentile(four, 100.0) == doctest::Approx(4.0));
    CHECK(percentile(four, 50.0) == doctest::Approx(2.5));
    CHECK(percentile(four, 25.0) == doctest::Approx(1.75));
    CHECK_THROWS_AS(percentile({}, 50.0), DomainError);
}

TEST_CASE("percentile agrees with the reference on random samples") {
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
        const int n = static_cast<int>(rng.uniform_int(1, 400));
        std::vector<std::uint16_t> s(n);
        std::vector<double> sd(n);
        for (int k = 0; k < n; ++k) {
            s[k] = static_cast<std::uint16_t>(rng.uniform_int(0, 4000));
            sd[k] = s[k];
        }
        const double pct = rng.uniform(0.0, 100.0);
        CHECK(percentile(s, pct) == doctest::Approx(ref::percentile(sd, pct)).epsilon(1e-12));
    }
}

TEST_CASE("stretch maps constant input to zeros") {
    std::vector<std::uint16_t> flat(100, 777);
    const auto out = stretch_to_8bit(flat, 2.0, 98.0);
    CHECK(std::all_of(out.begin(), out.end(), [](std::uint8_t v) { return v == 0; }));
}

TEST_CASE("stretch endpoints at the 0/100 percentiles") {
    std::vector<std::uint16_t> two{100, 200};
    const auto out = stretch_to_8bit(two, 0.0, 100.0);
    REQUIRE(out.size() == 2);
    CHECK(out[0] == 0);
    CHECK(out[1] == 255);
}

TEST_CASE("stretch of a 0..1023 ramp at 2/98") {
    std::vector<std::uint16_t> ramp(1024);
    std::iota(ramp.begin(), ramp.end(), 0);
    const auto out = stretch_to_8bit(ramp, 2.0, 98.0);
    CHECK(out.front() == 0);
    CHECK(out.back() == 255);
    // midpoint of the ramp sits at the middle of the stretched range
    CHECK(out[511] >= 127);
    CHECK(out[512] <= 128);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i] >= out[i - 1]);
}

TEST_CASE("stretch is monotone and saturates outside the percentile window") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(10, 500));
        std::vector<std::uint16_t> s(n);
        for (auto& v : s) v = static_cast<std::uint16_t>(rng.uniform_int(0, 10000));
        const double low = rng.uniform(0.0, 40.0);
        const double high = rng.uniform(60.0, 100.0);
        const auto out = stretch_to_8bit(s, low, high);

        std::vector<double> sd(s.begin(), s.end());
        const double lo = ref::percentile(sd, low);
        const double hi = ref::percentile(sd, high);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j)
                if (s[i] <= s[j]) CHECK(out[i] <= out[j]);
            if (s[i] <= lo) CHECK(out[i] == 0);
            if (hi > lo && s[i] >= hi) CHECK(out[i] == 255);
        }
    }
}

TEST_CASE("stretch percentile window validation") {
    std::vector<std::uint16_t> s{1, 2, 3};
    CHECK_THROWS_AS(stretch_to_8bit({}, 2.0, 98.0), DomainError);
    CHECK_THROWS_AS(stretch_to_8bit(s, 98.0, 2.0), DomainError);
    CHECK_THROWS_AS(stretch_to_8bit(s, -1.0, 98.0), DomainError);
    CHECK_THROWS_AS(stretch_to_8bit(s, 2.0, 101.0), DomainError);
    CHECK_THROWS_AS(stretch_to_8bit(s, 50.0, 50.0), DomainError);
}

TEST_CASE("png encodes start with the signature and are deterministic") {
    std::vector<std::uint8_t> pix(16 * 16, 0);
    for (std::size_t i = 0; i < pix.size(); ++i) pix[i] = static_cast<std::uint8_t>(i);
    const auto a = encode_png8(16, 16, 1, pix.data());
    const auto b = encode_png8(16, 16, 1, pix.data());
    REQUIRE(a.size() > 8);
    CHECK(a == b);
    const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    for (int i = 0; i < 8; ++i) CHECK(a[static_cast<std::size_t>(i)] == sig[i]);

    std::vector<std::uint8_t> rgb(8 * 8 * 3, 100);
    const auto c = encode_png8(8, 8, 3, rgb.data());
    CHECK(c.size() > 8);

    std::vector<std::uint8_t> bits(8 * 8, 0);
    bits[0] = 1;
    bits[63] = 255; // any nonzero sets the bit
    const auto d = encode_png1(8, 8, bits.data());
    CHECK(d.size() > 8);
    CHECK(d == encode_png1(8, 8, bits.data()));
}

TEST_CASE("scene raster save/load round trip preserves samples and dtype") {
    const fs::path dir = temp_dir("scene");
    for (geo::SampleType dtype : {geo::SampleType::u8, geo::SampleType::u16}) {
        geo::SceneRaster s;
        s.desc.width = 7;
        s.desc.height = 5;
        s.desc.bands = 2;
        s.desc.dtype = dtype;
        s.desc.epsg = 32643;
        s.desc.date = "2018-02-03";
        s.desc.gsd_m = 0.5;
        s.desc.transform = geo::GeoTransform({400000.0, 0.5, 0.0, 2500000.0, 0.0, -0.5});
        s.samples.resize(7 * 5 * 2);
        const int cap = dtype == geo::SampleType::u8 ? 255 : 65535;
        Rng rng(5);
        for (auto& v : s.samples)
            v = static_cast<std::uint16_t>(rng.uniform_int(0, cap));

        const fs::path raw = dir / (dtype == geo::SampleType::u8 ? "a.raw" : "b.raw");
        s.save(raw);
        CHECK(fs::exists(geo::sidecar_path_for(raw)));
        const geo::SceneRaster back = geo::SceneRaster::load(raw);
        CHECK(back.desc.width == 7);
        CHECK(back.desc.height == 5);
        CHECK(back.desc.bands == 2);
        CHECK(back.desc.dtype == dtype);
        CHECK(back.desc.epsg == 32643);
        CHECK(back.desc.date == "2018-02-03");
        CHECK(back.samples == s.samples);
    }
}

TEST_CASE("u16 scenes are written little-endian") {
    const fs::path dir = temp_dir("endian");
    geo::SceneRaster s;
    s.desc.width = 1;
    s.desc.height = 1;
    s.desc.bands = 1;
    s.desc.dtype = geo::SampleType::u16;
    s.desc.epsg = 3857;
    s.desc.date = "2011-01-01";
    s.desc.gsd_m = 0.5;
    s.samples = {0x0102};
    s.save(dir / "px.raw");
    const auto bytes = read_bytes(dir / "px.raw");
    REQUIRE(bytes.size() == 2);
    CHECK(bytes[0] == 0x02);
    CHECK(bytes[1] == 0x01);
}

TEST_CASE("sidecar path derivation") {
    CHECK(geo::sidecar_path_for("dir/scene.raw") == fs::path("dir/scene.scene.json"));
}

TEST_CASE("scene descriptor validation") {
    geo::SceneDescriptor d;
    d.width = 10;
    d.height = 10;
    d.bands = 1;
    d.epsg = 3857;
    d.date = "2011-01-01";
    d.gsd_m = 0.5;
    CHECK_NOTHROW(d.validate());
    geo::SceneDescriptor bad = d;
    bad.width = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = d;
    bad.bands = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = d;
    bad.gsd_m = -1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = d;
    bad.epsg = 1234;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("tile geotransform maps pixel edges onto tile corners") {
    const geo::TileIndex t{18, 183834, 113859};
    const geo::GeoTransform gt = tile_geotransform(t);
    const geo::Vec2 nw = geo::tile_pixel_to_mercator(t, 0.0, 0.0);
    const geo::Vec2 se = geo::tile_pixel_to_mercator(t, 512.0, 512.0);
    CHECK(gt.pixel_to_geo(0.0, 0.0).x == doctest::Approx(nw.x));
    CHECK(gt.pixel_to_geo(0.0, 0.0).y == doctest::Approx(nw.y));
    CHECK(gt.pixel_to_geo(512.0, 512.0).x == doctest::Approx(se.x).epsilon(1e-12));
    CHECK(gt.pixel_to_geo(512.0, 512.0).y == doctest::Approx(se.y).epsilon(1e-12));
}

TEST_CASE("an edge-aligned 2x2-tile scene splits into 4 tiles with exact seams") {
    const fs::path out = temp_dir("seam");
    const geo::SceneRaster scene = aligned_scene(18, 183900, 113900, 2, 2, 99);

    TilerOptions opt;
    opt.zoom = 18;
    opt.emit_raw = true;
    const auto entries = tile_scene(scene, opt, out);
    REQUIRE(entries.size() == 4);

    for (const auto& e : entries) {
        const int dx = static_cast<int>(e.index.x - 183900);
        const int dy = static_cast<int>(e.index.y - 113900);
        REQUIRE(dx >= 0);
        REQUIRE(dx < 2);
        REQUIRE(dy >= 0);
        REQUIRE(dy < 2);
        fs::path raw = out / e.path;
        raw.replace_extension(".raw");
        const auto samples = raw_tile_samples(raw);
        REQUIRE(samples.size() == 512 * 512);
        for (int r = 0; r < 512; ++r)
            for (int c = 0; c < 512; ++c)
                REQUIRE(samples[static_cast<std::size_t>(r) * 512 + c] ==
                        scene.at(0, r + 512 * dy, c + 512 * dx));
    }
}

TEST_CASE("manifest matches the covering range and is sorted") {
    const fs::path out = temp_dir("manifest");
    const geo::SceneRaster scene = aligned_scene(18, 183850, 113850, 2, 1, 7);
    TilerOptions opt;
    opt.zoom = 18;
    const auto entries = tile_scene(scene, opt, out);

    const geo::TileRange range =
        geo::tiles_covering(scene.desc.footprint_lonlat(), 18);
    CHECK(static_cast<std::int64_t>(entries.size()) == range.count());
    for (std::size_t i = 1; i < entries.size(); ++i)
        CHECK(entries[i - 1].index < entries[i].index);
    for (const auto& e : entries) {
        CHECK(e.index.x >= range.x0);
        CHECK(e.index.x <= range.x1);
        CHECK(e.index.y >= range.y0);
        CHECK(e.index.y <= range.y1);
        CHECK(fs::exists(out / e.path));
        const geo::LonLatBox b = geo::tile_bounds(e.index);
        CHECK(e.bounds.west == doctest::Approx(b.west));
        CHECK(e.bounds.north == doctest::Approx(b.north));
    }

    write_tile_manifest(entries, out / "manifest.json");
    const auto back = load_tile_manifest(out / "manifest.json");
    REQUIRE(back.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(back[i].index == entries[i].index);
        CHECK(back[i].path == entries[i].path);
        CHECK(back[i].bounds.west == doctest::Approx(entries[i].bounds.west));
    }
}

TEST_CASE("any jobs count produces byte-identical tiles") {
    const fs::path out1 = temp_dir("jobs1");
    const fs::path out8 = temp_dir("jobs8");
    const geo::SceneRaster scene = aligned_scene(18, 184000, 114000, 2, 2, 3);

    TilerOptions opt;
    opt.zoom = 18;
    opt.emit_raw = true;
    opt.jobs = 1;
    const auto e1 = tile_scene(scene, opt, out1);
    opt.jobs = 8;
    const auto e8 = tile_scene(scene, opt, out8);
    REQUIRE(e1.size() == e8.size());
    for (std::size_t i = 0; i < e1.size(); ++i) {
        CHECK(e1[i].index == e8[i].index);
        CHECK(fnv1a64_file(out1 / e1[i].path) == fnv1a64_file(out8 / e8[i].path));
        fs::path r1 = out1 / e1[i].path, r8 = out8 / e8[i].path;
        r1.replace_extension(".raw");
        r8.replace_extension(".raw");
        CHECK(fnv1a64_file(r1) == fnv1a64_file(r8));
    }
}

TEST_CASE("pixels outside the scene become the nodata value") {
    const fs::path out = temp_dir("nodata");
    // quarter-tile scene: the remaining three quarters of its tile are nodata
    geo::SceneRaster scene = aligned_scene(18, 184100, 114100, 1, 1, 1);
    scene.desc.width = 256;
    scene.desc.height = 256;
    scene.samples.assign(256 * 256, 5);

    TilerOptions opt;
    opt.zoom = 18;
    opt.emit_raw = true;
    opt.nodata = 42;
    const auto entries = tile_scene(scene, opt, out);
    REQUIRE(entries.size() == 1);
    fs::path raw = out / entries[0].path;
    raw.replace_extension(".raw");
    const auto samples = raw_tile_samples(raw);
    CHECK(samples[0] == 5);                        // top-left quarter: data
    CHECK(samples[0 * 512 + 500] == 42);           // top-right: nodata
    CHECK(samples[500 * 512 + 0] == 42);           // bottom-left: nodata
    CHECK(samples[static_cast<std::size_t>(500) * 512 + 500] == 42);
}

TEST_CASE("tiler rejects zooms outside the configured window") {
    const geo::SceneRaster scene = aligned_scene(18, 183900, 113900, 1, 1, 2);
    TilerOptions opt;
    opt.zoom = 12;
    opt.zoom_min = 18;
    opt.zoom_max = 19;
    CHECK_THROWS_AS(tile_scene(scene, opt, temp_dir("zoomcheck")), ConfigError);
}

TEST_CASE("render_tile is a pure function of scene and tile") {
    const geo::SceneRaster scene = aligned_scene(18, 183900, 113900, 1, 1, 4);
    const geo::TileIndex t{18, 183900, 113900};
    const TileImage a = render_tile(scene, t, 0);
    const TileImage b = render_tile(scene, t, 0);
    CHECK(a.samples == b.samples);
    CHECK(a.bands == 1);
    CHECK(a.at(0, 0, 0) == scene.at(0, 0, 0));
}
