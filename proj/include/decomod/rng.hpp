#pragma once

#include <cstdint>
#include <random>

namespace decomod {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and up to three tags.
// Used so that replicate r of a Monte Carlo run depends only on (seed, r),
// which keeps results identical whether replicates run sequentially or not.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag0,
                                 std::uint64_t tag1 = 0, std::uint64_t tag2 = 0) {
    std::uint64_t s = splitmix64(base ^ 0xA0761D6478BD642Full);
    s = splitmix64(s ^ tag0);
    s = splitmix64(s ^ tag1);
    s = splitmix64(s ^ tag2);
    return s;
}

// mt19937_64 wrapper with rejection-sampled bounded draws. The engine's output
// sequence is pinned by the standard, and the helpers below avoid
// std::uniform_*_distribution, whose streams vary across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, bound). bound must be >= 1.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % bound;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

}  // namespace decomod
