#include "canopy/annot/split.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/util/error.hpp"
#include "canopy/util/rng.hpp"

namespace canopy::annot {

DatasetSplit split_dataset(const std::vector<std::string>& ids,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
    if (ids.empty()) throw DomainError("cannot split an empty id list");
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw DomainError("split ratios must sum to 1, got " + std::to_string(sum));
    for (double r : ratios)
        if (r < 0.0) throw DomainError("split ratios must be non-negative");

    std::vector<std::pair<std::uint64_t, std::string>> keyed;
    keyed.reserve(ids.size());
    for (const std::string& id : ids)
        keyed.emplace_back(mix64(seed ^ fnv1a64(id)), id);
    std::sort(keyed.begin(), keyed.end());

    const std::size_t n = keyed.size();
    std::array<std::size_t, 3> sizes{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        sizes[i] = static_cast<std::size_t>(std::floor(ratios[i] * static_cast<double>(n)));
        assigned += sizes[i];
    }
    for (int i = 0; assigned < n; i = (i + 1) % 3) {
        ++sizes[i];
        ++assigned;
    }

    DatasetSplit split;
    split.seed = seed;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < sizes[0]; ++i) split.train.push_back(keyed[pos++].second);
    for (std::size_t i = 0; i < sizes[1]; ++i) split.val.push_back(keyed[pos++].second);
    for (std::size_t i = 0; i < sizes[2]; ++i) split.test.push_back(keyed[pos++].second);
    return split;
}

} // namespace canopy::annot
