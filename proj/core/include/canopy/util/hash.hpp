#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace canopy {

// FNV-1a 64 content fingerprints for run manifests and the determinism
// checks. Not cryptographic.
std::uint64_t fnv1a64_bytes(std::span<const std::byte> data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

} // namespace canopy
