#pragma once

#include "elmfs/types.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace elmfs {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Domain tags that keep independent stream families apart.
enum class StreamTag : std::uint64_t {
    Trial = 1,
    Dataset = 2,
    ModelInit = 3,
    Probe = 4,
    Test = 5,
};

/// Random stream seeded from a key tuple. Two streams built from the same
/// (seed, tag, keys...) produce identical sequences, independent of which
/// thread builds them or in what order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng stream(std::uint64_t seed, StreamTag tag,
                      std::initializer_list<std::uint64_t> keys = {}) {
        std::uint64_t h = mix64(seed ^ 0x5eedf00dULL);
        h = mix64(h ^ static_cast<std::uint64_t>(tag));
        for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
        return Rng(h);
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    // Inclusive on both ends.
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double normal() { return normal_(engine_); }
    std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

    // Circular complex Gaussian with total variance `variance`.
    Complex complex_normal(double variance) {
        const double sd = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {sd * re, sd * im};
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace elmfs
