#pragma once
// Counter-based Gaussian stream. Every variate is a pure function of
// (seed, sample, index), so parallel workers and reruns produce identical
// disorder realizations without any shared state.

#include <cmath>
#include <cstdint>

namespace spinflip {
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t sample,
                                  std::uint64_t index) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    h = mix64(h ^ (sample + 0xbf58476d1ce4e5b9ULL));
    h = mix64(h ^ (index + 0x94d049bb133111ebULL));
    return h;
}

// uniform in (0,1]
inline double uniform01(std::uint64_t bits) {
    return ((bits >> 11) + 1.0) * 0x1.0p-53;
}

// standard normal via Box-Muller; one variate per (seed, sample, index)
inline double gaussian(std::uint64_t seed, std::uint64_t sample, std::uint64_t index) {
    double u1 = uniform01(counter_hash(seed, sample, 2 * index));
    double u2 = uniform01(counter_hash(seed, sample, 2 * index + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace rng
}  // namespace spinflip
