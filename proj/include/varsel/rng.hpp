#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace varsel {

// 64-bit finalizer from splitmix64; bijective, good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based seed derivation: any (cell, replicate) stream can be
// reconstructed in isolation, so scheduling order never matters.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t cell,
                                 std::uint64_t replicate) {
    return mix64(mix64(mix64(base) ^ cell) ^ replicate);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Seeded random stream with samplers implemented on top of the engine's raw
// output. mt19937_64 is pinned by the standard and the samplers below avoid
// std::*_distribution, whose algorithms are implementation-defined, so a
// given seed yields the same draws on every platform.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, one value per two uniforms. No cached
    // second value: the stream position stays a pure function of call count.
    double normal();

    bool bernoulli(double p) { return uniform01() < p; }

    // Poisson draw; inversion by multiplication for small means, transformed
    // rejection (PTRD) otherwise.
    long poisson(double mean);

    // Uniform integer in [0, n); rejection sampling, no modulo bias.
    std::uint64_t uniform_below(std::uint64_t n);

    // In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace varsel
