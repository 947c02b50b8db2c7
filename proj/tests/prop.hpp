#pragma once

// Hand-rolled generators for property-style tests. Seeded per test so runs
// are reproducible.

#include <cstdint>
#include <string>
#include <vector>

#include "grc/rng.hpp"

namespace grc::testutil {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return rng_.next_below(n); }
    double real01() { return rng_.next_double(); }
    double real(double lo, double hi) { return rng_.next_in(lo, hi); }
    bool chance(double p) { return rng_.next_double() < p; }

    /// Random string over the given alphabet, length in [0, max_len].
    std::string str(std::size_t max_len, std::string_view alphabet = "abc") {
        std::size_t len = below(max_len + 1);
        std::string s;
        s.reserve(len);
        for (std::size_t i = 0; i < len; ++i)
            s.push_back(alphabet[below(alphabet.size())]);
        return s;
    }

    /// Printable ASCII with whitespace and some control characters mixed in.
    std::string messy_str(std::size_t max_len) {
        static const std::string pool =
            " \t\n\r\f\vabcXYZ019.,!?-_ \t abcHELLO   ";
        std::size_t len = below(max_len + 1);
        std::string s;
        for (std::size_t i = 0; i < len; ++i) {
            if (chance(0.05)) {
                s.push_back(static_cast<char>(below(32)));
            } else {
                s.push_back(pool[below(pool.size())]);
            }
        }
        return s;
    }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    SplitMix64 rng_;
};

}  // namespace grc::testutil
