#pragma once

#include <cstdint>

namespace sbl {

// Counter-free splittable PRNG. Every (master_seed, stream) pair yields an
// independent deterministic sequence, so per-path / per-sample streams can be
// created on the fly without coordinating state between consumers.
//
// Core transform is SplitMix64 (Steele, Lea, Flood 2014): 64-bit state advanced
// by a Weyl constant and scrambled by two xor-shift multiplies. Passes the usual
// statistical batteries at the scale used here.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream) {
        // Fold the stream index into the seed through two scramble rounds so
        // that neighbouring streams are uncorrelated.
        state_ = scramble(master_seed + 0x9e3779b97f4a7c15ull * (stream + 1));
        state_ = scramble(state_ ^ 0xbf58476d1ce4e5b9ull);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return scramble(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive. Rejection-free modulo is
    // fine here: n is tiny compared to 2^64, bias is ~n/2^64.
    std::uint64_t next_below(std::uint64_t n) {
        return next_u64() % n;
    }

private:
    static std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace sbl
