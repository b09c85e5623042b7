#pragma once

#include <cstdint>
#include <string_view>

namespace canopy {

// splitmix64 finalizer; also usable as a stateless position hash.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic generator (splitmix64 sequence). All randomness in the
// project flows through this class so outputs are reproducible across
// platforms; std:: distributions are avoided on purpose.
//
// Stream-splitting rule: a named child stream is seeded with
// mix64(seed ^ fnv1a64(tag)), so components (scene, epoch edits,
// detector noise, ...) are independently reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static Rng stream(std::uint64_t seed, std::string_view tag) {
        return Rng(mix64(seed ^ fnv1a64(tag)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // inclusive bounds; modulo bias is irrelevant at the spans used here
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_u64() %
                    static_cast<std::uint64_t>(hi - lo + 1));
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, uncached (two uniforms per draw keeps the stream
    // position independent of call history).
    double normal(double mean = 0.0, double stddev = 1.0);

private:
    std::uint64_t state_;
};

// Stateless position hash in [0,1) for procedural textures.
inline double hash01(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t salt) {
    std::uint64_t h = mix64(a * 0x9e3779b97f4a7c15ULL ^ mix64(b ^ mix64(c ^ salt)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace canopy
