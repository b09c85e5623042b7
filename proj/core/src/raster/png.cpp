#include "canopy/raster/png.hpp"

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "canopy/util/error.hpp"

namespace canopy::raster {

namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
    put_u32_be(out, static_cast<std::uint32_t>(len));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    if (len) out.insert(out.end(), data, data + len);
    const auto crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + len));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> deflate_buffer(const std::vector<std::uint8_t>& raw) {
    uLongf dest_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(dest_len);
    const int rc = compress2(out.data(), &dest_len, raw.data(),
                             static_cast<uLong>(raw.size()), 6);
    if (rc != Z_OK) throw IoError("zlib compression failed");
    out.resize(dest_len);
    return out;
}

std::vector<std::uint8_t> assemble_png(int width, int height, int bit_depth,
                                       int color_type,
                                       const std::vector<std::uint8_t>& scanlines) {
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> png(sig, sig + 8);

    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(width >> 24);
    ihdr[1] = static_cast<std::uint8_t>(width >> 16);
    ihdr[2] = static_cast<std::uint8_t>(width >> 8);
    ihdr[3] = static_cast<std::uint8_t>(width);
    ihdr[4] = static_cast<std::uint8_t>(height >> 24);
    ihdr[5] = static_cast<std::uint8_t>(height >> 16);
    ihdr[6] = static_cast<std::uint8_t>(height >> 8);
    ihdr[7] = static_cast<std::uint8_t>(height);
    ihdr[8] = static_cast<std::uint8_t>(bit_depth);
    ihdr[9] = static_cast<std::uint8_t>(color_type);
    ihdr[10] = 0; // compression
    ihdr[11] = 0; // filter
    ihdr[12] = 0; // no interlace
    append_chunk(png, "IHDR", ihdr, sizeof ihdr);

    const auto idat = deflate_buffer(scanlines);
    append_chunk(png, "IDAT", idat.data(), idat.size());
    append_chunk(png, "IEND", nullptr, 0);
    return png;
}

} // namespace

std::vector<std::uint8_t> encode_png8(int width, int height, int channels,
                                      const std::uint8_t* pixels) {
    if (width < 1 || height < 1) throw DomainError("png dimensions must be >= 1");
    if (channels != 1 && channels != 3)
        throw DomainError("png channels must be 1 or 3, got " + std::to_string(channels));

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int r = 0; r < height; ++r) {
        raw.push_back(0); // filter: none
        raw.insert(raw.end(), pixels + r * stride, pixels + (r + 1) * stride);
    }
    return assemble_png(width, height, 8, channels == 1 ? 0 : 2, raw);
}

std::vector<std::uint8_t> encode_png1(int width, int height, const std::uint8_t* pixels) {
    if (width < 1 || height < 1) throw DomainError("png dimensions must be >= 1");

    const int row_bytes = (width + 7) / 8;
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(row_bytes + 1) * height);
    for (int r = 0; r < height; ++r) {
        raw.push_back(0);
        for (int b = 0; b < row_bytes; ++b) {
            std::uint8_t packed = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int c = b * 8 + bit;
                if (c < width && pixels[static_cast<std::size_t>(r) * width + c])
                    packed |= static_cast<std::uint8_t>(0x80 >> bit);
            }
            raw.push_back(packed);
        }
    }
    return assemble_png(width, height, 1, 0, raw);
}

void write_binary_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure: " + path.string());
}

} // namespace canopy::raster
