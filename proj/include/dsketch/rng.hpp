#pragma once

#include <cstdint>
#include <random>

namespace dsketch {

// splitmix64 finalizer, used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Portable seeded generator: std::mt19937_64 (its output sequence is fixed by
// the standard) with our own bit-level distributions, since the std::
// distribution objects are implementation-defined.
class rng {
public:
    explicit rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix64(seed)) {}

    std::uint64_t seed() const { return seed_; }

    // Independent stream number `index`; a pure function of (seed, index).
    rng substream(std::uint64_t index) const { return rng(mix64(seed_ ^ mix64(index + 0x51ed27ULL))); }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [lo, hi], unbiased (rejection sampling).
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t span = hi - lo;
        if (span == ~std::uint64_t{0}) return engine_();
        std::uint64_t range = span + 1;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + x % range;
    }

    // True with probability p; p >= 1 always succeeds without consuming a draw
    // ("probability 1" must be exact, not 1 - 2^-53).
    bool coin(double p) {
        if (p >= 1.0) return true;
        if (p <= 0.0) return false;
        return next_unit() < p;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace dsketch
