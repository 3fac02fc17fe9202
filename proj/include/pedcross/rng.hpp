#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "pedcross/errors.hpp"

namespace pedcross {

// splitmix64 finalizer; used to derive independent stream seeds from one
// master seed so that e.g. each participant pair or each tree gets its own
// reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return mix_seed(seed ^ mix_seed(stream));
}

// Deterministic sampler. std::mt19937_64 is bit-exact by the standard, but
// the standard *distributions* are not, so the samplers below are written
// out explicitly; output is byte-identical across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, n).
    std::size_t uniform_below(std::size_t n) {
        if (n == 0) throw Error("uniform_below: n must be positive");
        const std::uint64_t nn = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % nn;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return static_cast<std::size_t>(r % nn);
    }

    // Standard normal via Box-Muller (no cached spare, keeps the stream
    // consumption pattern trivial to reason about).
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1]
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Rejection sampling from the untruncated normal. Truncation regions in
    // this project are wide, so acceptance rates stay high; the iteration
    // cap guards against misconfigured bounds.
    double truncated_normal(double mean, double sd, double low, double high) {
        if (!(low < high)) throw ConfigError("truncated_normal: low must be < high");
        for (int i = 0; i < 100000; ++i) {
            const double x = normal(mean, sd);
            if (x >= low && x <= high) return x;
        }
        throw ConfigError("truncated_normal: acceptance region too narrow for rejection sampling");
    }

    // Fisher-Yates; std::shuffle is implementation-defined, this is not.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_below(i)]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace pedcross
