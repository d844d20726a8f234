#pragma once

#include <cstdint>
#include <limits>

namespace dsps::trajectory {

// SplitMix64: a counter-based generator; state advances by a fixed increment and each
// output is a bijective mix of the counter.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(state_ += 0x9E3779B97F4A7C15ULL); }

    // Uniform on (0, 1), 53-bit resolution.
    double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Independent stream for one work item, whatever order items run in.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64(SplitMix64::mix(seed ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ULL)));
}

}  // namespace dsps::trajectory
