#pragma once

#include <cstdint>
#include <random>

namespace sse {

// splitmix64: bijective 64-bit mixer (Steele, Lea, Flood 2014).  Used to derive
// independent child streams from a (seed, key) pair so that results never
// depend on the order in which streams are consumed.
inline std::uint64_t splitmix64(std::uint64_t v) {
    v += 0x9e3779b97f4a7c15ULL;
    v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
    v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
    return v ^ (v >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t key) {
    return splitmix64(splitmix64(seed) ^ key);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t key) {
    return std::mt19937_64(derive_stream(seed, key));
}

}  // namespace sse
