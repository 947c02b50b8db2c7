#pragma once

#include <cstdint>
#include <string_view>

namespace grc {

// Deterministic random streams used by the view protocol and the scripted
// backend. The derivation is part of the protocol contract and must stay
// stable across releases:
//
//   fnv1a64(bytes)       FNV-1a, offset 0xcbf29ce484222325, prime 0x100000001b3
//   mix64(x)             the SplitMix64 output permutation
//   stream key           mix64(seed ^ fnv1a64(tag))
//   SplitMix64::next()   x += 0x9e3779b97f4a7c15, then mix64(x)
//   next_double()        (next() >> 11) * 2^-53, uniform in [0, 1)
//
// Uniform draws never go through <random> distributions, whose output is
// implementation-defined.

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// Uniform in [0, 1), 53 bits of entropy.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_in(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform in {0, ..., n-1}. Modulo bias is negligible for small n.
    std::uint64_t next_below(std::uint64_t n) {
        return next() % n;
    }

private:
    std::uint64_t state_;
};

/// Stream keyed by (seed, tag). Identical arguments yield identical streams.
inline SplitMix64 keyed_stream(std::uint64_t seed, std::string_view tag) {
    return SplitMix64(mix64(seed ^ fnv1a64(tag)));
}

}  // namespace grc
