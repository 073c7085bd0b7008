/* betadyn -- seedable splitmix64 stream.
 *
 * One fixed algorithm so that a seed means the same sample sequence on
 * every platform and in every build; nothing in the library uses
 * std::random_* engines for anything that lands in an output file.
 */
#pragma once

#include <cstdint>

#include "betadyn/rational.hpp"

namespace betadyn {

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /* uniform in [0,1) with 53 random bits */
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /* uniform integer in [0, n) without modulo bias for n << 2^64 */
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /* uniform rational k/den with 0 <= k < den */
    Rat next_rat_unit(std::uint64_t den) {
        Rat q(static_cast<unsigned long>(next_below(den)),
              static_cast<unsigned long>(den));
        q.canonicalize();
        return q;
    }

    /* derive an independent stream deterministically (per-task seeding) */
    SplitMix64 fork(std::uint64_t salt) {
        SplitMix64 s(state_ ^ (0xA5A5A5A55A5A5A5AULL + salt * 0x9E3779B97F4A7C15ULL));
        s.next_u64();
        return s;
    }

private:
    std::uint64_t state_;
};

} // namespace betadyn
