#pragma once

// Seeded random source with a fully documented algorithm so that generated
// benchmarks are reproducible across platforms and implementations:
//   * engine: std::mt19937_64 (the 64-bit Mersenne Twister, whose output
//     sequence is pinned by the C++ standard),
//   * uniform doubles: (x >> 11) * 2^-53, i.e. the top 53 bits,
//   * normals: basic Box-Muller using two uniforms per draw,
//   * bounded integers: rejection sampling to remove modulo bias.
// None of the implementation-defined <random> distributions are used.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace anobench {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): top 53 bits scaled by 2^-53.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; used where log() must not see zero.
    double uniform01_open0() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller (cosine branch only; one draw consumes
    // two engine outputs, which keeps the stream position easy to reason
    // about).
    double normal() {
        const double u1 = uniform01_open0();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Uniform integer in [0, bound); bound must be nonzero. Rejection keeps
    // the result exactly uniform.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t min = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= min) return r % bound;
        }
    }

    std::size_t index(std::size_t size) {
        return static_cast<std::size_t>(below(static_cast<std::uint64_t>(size)));
    }

    bool coin() { return (engine_() >> 63) != 0; }

    // Fisher-Yates; identical result on every platform for a fixed seed.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    // Derive an independent stream for a sub-task without disturbing this
    // stream. The mixing constant is the 64-bit golden ratio as used in
    // splitmix64.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace anobench
