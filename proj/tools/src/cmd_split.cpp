#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "canopy/annot/labelme.hpp"
#include "canopy/annot/mask.hpp"
#include "canopy/annot/split.hpp"
#include "canopy/raster/grid.hpp"
#include "canopy/raster/png.hpp"
#include "canopy/util/error.hpp"

namespace canopy::cli {

namespace fs = std::filesystem;

namespace {

void write_id_list(const fs::path& path, const std::vector<std::string>& ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& id : ids) out << id << '\n';
}

// parse_annotation_file has already accepted the document, so imagePath is
// present and a string. Files whose shapes were all rejected still name an
// image and still belong to the dataset.
std::string image_id_of(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    nlohmann::json doc = nlohmann::json::parse(in);
    return doc.at("imagePath").get<std::string>();
}

} // namespace

SplitStageResult stage_split(const fs::path& annotations_dir, std::uint64_t seed,
                             const std::array<double, 3>& ratios, bool masks,
                             const fs::path& out_dir) {
    std::vector<std::string> ids;
    struct Image {
        std::string id;
        std::vector<annot::PolygonAnnotation> polygons;
    };
    std::vector<Image> images;

    for (const auto& file : annot::list_annotation_files(annotations_dir)) {
        annot::AnnotationParseResult parsed =
            annot::parse_annotation_file(file, annot::AnnotationParseOptions{});
        for (const auto& rej : parsed.rejected)
            std::fprintf(stderr, "warning: %s: shape %d rejected: %s\n",
                         file.filename().string().c_str(), rej.shape_index,
                         rej.reason.c_str());
        std::string id = image_id_of(file);
        ids.push_back(id);
        images.push_back({std::move(id), std::move(parsed.annotations)});
    }
    if (ids.empty())
        throw DomainError("no annotation files (*.json) in " + annotations_dir.string());

    annot::DatasetSplit split = annot::split_dataset(ids, ratios, seed);
    write_id_list(out_dir / "train.txt", split.train);
    write_id_list(out_dir / "val.txt", split.val);
    write_id_list(out_dir / "test.txt", split.test);

    if (masks) {
        fs::path mask_dir = out_dir / "masks";
        fs::create_directories(mask_dir);
        for (const auto& image : images) {
            raster::Grid<std::uint8_t> combined(512, 512, 0);
            for (const auto& poly : image.polygons) {
                raster::Grid<std::uint8_t> m = annot::fill_polygon(poly.points, 512, 512);
                for (std::size_t i = 0; i < combined.data().size(); ++i)
                    if (m.data()[i]) combined.data()[i] = 1;
            }
            std::string flat = image.id;
            if (auto dot = flat.rfind('.'); dot != std::string::npos) flat.resize(dot);
            std::replace(flat.begin(), flat.end(), '/', '_');
            raster::write_binary_file(mask_dir / (flat + ".png"),
                                      raster::encode_png1(512, 512, combined.data().data()));
        }
    }
    return {split.train.size(), split.val.size(), split.test.size()};
}

int run_split(const SplitArgs& a) {
    require_flag(a.annotations, "--annotations");
    require_flag(a.out, "--out");
    std::array<double, 3> ratios = parse_ratio_spec(a.ratios);

    RunContext run("split", a.out, /*dir_mode=*/true);
    run.param("seed", static_cast<std::int64_t>(a.seed));
    run.param("ratios", a.ratios);
    run.param("masks", a.masks);
    run.input_dir("annotations", a.annotations);

    SplitStageResult res = stage_split(a.annotations, a.seed, ratios, a.masks, run.stage());
    run.note("train", res.train);
    run.note("val", res.val);
    run.note("test", res.test);
    run.finalize();

    std::printf("split %zu annotated tiles into train=%zu val=%zu test=%zu\n",
                res.train + res.val + res.test, res.train, res.val, res.test);
    return 0;
}

} // namespace canopy::cli
