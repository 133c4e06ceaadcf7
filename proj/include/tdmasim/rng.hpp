#pragma once

#include <cstdint>
#include <random>

namespace tdma {

// Deterministic random source. mt19937_64 output is pinned by the standard,
// and the bounded draw below avoids std::uniform_int_distribution, whose
// results differ between standard library implementations. Replaying a seed
// therefore reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw from [lo, hi], inclusive. Rejection sampling keeps the
    // draw unbiased.
    std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
        if (lo >= hi) return lo;
        const std::uint64_t span = hi - lo + 1;
        const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit && limit != 0);
        return lo + x % span;
    }

    // Uniform in [0, 1).
    double unit() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return unit() < p;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace tdma
