#pragma once

#include <cstdint>
#include <random>

namespace fanneal {

// Seed policy
// -----------
// A run has one master seed. Sub-streams are keyed by a counter and derived
// with the SplitMix64 finalizer:
//
//     derive_seed(seed, k) = mix(seed + (k + 1) * golden)
//
// Replicate r of an ensemble uses derive_seed(master, r) as its Wiener seed;
// column j of a Wiener path with seed s draws from
// mt19937_64(derive_seed(s, j)). Column j is therefore the same for every
// path width that includes it: column 0 of a 2-dim path equals the 1-dim
// path with the same seed.

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed + (stream + 1) * 0x9e3779b97f4a7c15ULL);
}

/// Standard-normal stream for one Wiener column.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace fanneal
