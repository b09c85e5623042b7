#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace canopy::annot {

struct DatasetSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
};

// Deterministic partition: ids are shuffled by sorting on
// (mix64(seed ^ fnv1a64(id)), id) — a keyed order that does not depend on
// the input ordering — then cut into contiguous runs. Sizes are the floor
// of each ratio share with the leftover handed out one-by-one in bucket
// order train, val, test, which keeps every bucket within one element of
// its exact share.
DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

} // namespace canopy::annot
