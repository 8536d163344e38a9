#pragma once

#include <cmath>
#include <cstdint>

namespace rfdd {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based generator: draw i of a stream is a pure function of
// (seed, i), so tiled or reordered generation stays deterministic.
struct CounterRng {
    std::uint64_t key = 0;

    explicit CounterRng(std::uint64_t seed) : key(splitmix64(seed)) {}

    std::uint64_t bits(std::uint64_t counter) const {
        return splitmix64(key ^ (counter * 0xD1B54A32D192ED03ull));
    }

    // uniform in [0, 1)
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // uniform in [-bound, bound)
    double uniform_signed(std::uint64_t counter, double bound) const {
        return (2.0 * uniform(counter) - 1.0) * bound;
    }

    // standard normal via Box-Muller; consumes sub-counters 2i and 2i+1
    double normal(std::uint64_t counter) const {
        const double u1 =
            (static_cast<double>(bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform(2 * counter + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
};

// Sequential facade over CounterRng for weight initialization.
struct SeqRng {
    CounterRng rng;
    std::uint64_t next = 0;

    explicit SeqRng(std::uint64_t seed) : rng(seed) {}

    double uniform() { return rng.uniform(next++); }
    double uniform_signed(double bound) { return rng.uniform_signed(next++, bound); }
};

}  // namespace rfdd
