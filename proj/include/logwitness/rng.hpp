#pragma once

#include <cstdint>

namespace logwitness {

// The single source of randomness for the whole project. The sequence is
// fixed bit-exactly so experiments reproduce across builds and languages:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Bounded draws are plain remainders: below(k) = next() % k.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform-ish value in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    // Inclusive integer range.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool coin() { return (next() & 1u) != 0; }

private:
    std::uint64_t state_;
};

// Deterministic substream seed: one SplitMix64 step of seed XOR salt*golden.
// Used to give every (row, sample) its own independent stream so results do
// not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return SplitMix64(seed ^ (salt * 0x9E3779B97F4A7C15ull)).next();
}

}  // namespace logwitness
