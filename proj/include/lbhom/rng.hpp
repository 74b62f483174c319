#pragma once

#include <cmath>
#include <cstdint>

namespace lbhom {

// Counter-based random stream: an independent SplitMix64 sequence keyed by
// (seed, stream index). Streams are reproducible regardless of how work is
// partitioned across threads, which is what makes the Monte Carlo outputs
// bit-identical for a fixed seed.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        state_ = mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1));
        state_ = mix(state_ + 0xBF58476D1CE4E5B9ULL);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0,1]
    double uniform_pos() { return 1.0 - uniform(); }

    double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

    double angle() { return 6.283185307179586476925286766559 * uniform(); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

}  // namespace lbhom
