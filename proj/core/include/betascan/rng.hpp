#pragma once

#include <cstdint>
#include <initializer_list>

// Counter-based pseudo randomness built on the splitmix64 finalizer.
// Everything here is pure integer arithmetic, so streams are reproducible
// across platforms, runs, and thread schedules. Two access patterns:
//
//   * stream_at(seed, i): the i-th output of the splitmix64 stream seeded at
//     `seed`, addressable in O(1). The graph sampler uses this with
//     i = canonical pair rank so each vertex pair owns one uniform.
//   * SplitMix64: the same stream consumed sequentially (geometric skipping,
//     support shuffling).
//
// seed_mix folds integers into derived seeds; the simulation engine documents
// its seeding as seed_mix chains over (master seed, test code, indices).

namespace betascan {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_at(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed + (index + 1) * kGolden64);
}

// 53-bit uniform in [0, 1).
inline double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += kGolden64;
        return mix64(state);
    }

    double next_unit() { return unit_double(next()); }
};

inline std::uint64_t seed_mix(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ (mix64(b) + kGolden64 + (a << 6) + (a >> 2)));
}

// Left fold: seed_mix({a, b, c}) = seed_mix(seed_mix(a, b), c), and a
// singleton list is its own value. The telescoping property is load-bearing:
// a grid cell seeded with {master, test, i, j, rep} is reproducible by
// seeding a standalone run at seed_mix({master, test, i, j}).
inline std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = kGolden64;
    bool first = true;
    for (std::uint64_t p : parts) {
        h = first ? p : seed_mix(h, p);
        first = false;
    }
    return h;
}

} // namespace betascan
