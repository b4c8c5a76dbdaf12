#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace streamq {

// All randomness in the library flows through this header so that runs are
// reproducible bit-for-bit from a single 64-bit seed. The engine is
// std::mt19937_64, whose output sequence is fixed by the C++ standard; the
// value mappings below are written out explicitly because the standard
// <random> distributions are free to differ between standard libraries.

/// SplitMix64 step, used to derive independent sub-seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Sub-seed for the component with the given tag (estimator slot, segment
/// index, trial number). Distinct tags give decorrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    return splitmix64(splitmix64(master) ^ tag);
}

/// Deterministic random source: mt19937_64 plus explicit value mappings.
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53-bit resolution.
    double u01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1], safe as a log() argument.
    double u01_open_low() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Masked rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) {
        if (bound < 2) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> countl_zero_(bound - 1);
        std::uint64_t v;
        do {
            v = engine_() & mask;
        } while (v >= bound);
        return v;
    }

    /// Standard normal via Box-Muller; consumes two draws per value.
    double gaussian() {
        double u1 = u01_open_low();
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

private:
    static int countl_zero_(std::uint64_t x) {
        int n = 0;
        if (x == 0) return 64;
        while (!(x & (std::uint64_t{1} << 63))) {
            x <<= 1;
            ++n;
        }
        return n;
    }

    std::mt19937_64 engine_;
};

} // namespace streamq
