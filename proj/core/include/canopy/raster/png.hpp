#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace canopy::raster {

// Minimal PNG encoder (writer only; nothing in the pipeline reads PNGs back).
// Every scanline uses filter type 0 and one fixed zlib level, so identical
// pixels always encode to identical bytes.

// channels: 1 = grayscale, 3 = RGB. pixels are row-major, interleaved,
// width*height*channels bytes.
std::vector<std::uint8_t> encode_png8(int width, int height, int channels,
                                      const std::uint8_t* pixels);

// 1-bit grayscale; any nonzero input byte becomes a set bit.
std::vector<std::uint8_t> encode_png1(int width, int height, const std::uint8_t* pixels);

void write_binary_file(const std::filesystem::path& path,
                       const std::vector<std::uint8_t>& bytes);

} // namespace canopy::raster
