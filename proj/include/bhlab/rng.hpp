#pragma once

#include <cstdint>
#include <random>

namespace bhlab {

// Deterministic seed plumbing. Child streams are pure functions of
// (parent seed, key), so per-restart and per-trial work is reproducible
// regardless of execution order.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
    return splitmix64(splitmix64(seed) ^ splitmix64(key + 0x632be59bd9b4e019ULL));
}

// All random streams run on mt19937_64 seeded through splitmix64, so nearby
// user seeds still give decorrelated streams.
inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Uniform double in [0, 1) built directly from the top 53 bits; avoids the
// implementation-defined layout of std::uniform_real_distribution.
inline double uniform_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace bhlab
