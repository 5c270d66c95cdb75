#pragma once

#include <cstdint>
#include <limits>

namespace relaysim {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent 64-bit seed from a parent seed and a tag.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept
{
    return splitmix64_mix(parent + 0x9E3779B97F4A7C15ULL * (splitmix64_mix(tag) | 1ULL));
}

/// SplitMix64 stream keyed by (master seed, trial index).
///
/// Every trial owns its stream, so a Monte Carlo run produces the same
/// draws no matter how trials are distributed over workers. Satisfies
/// UniformRandomBitGenerator and can drive any <random> distribution.
class TrialStream {
public:
    using result_type = std::uint64_t;

    TrialStream(std::uint64_t master_seed, std::uint64_t trial_index) noexcept
        : state_(derive_seed(master_seed, trial_index))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept
    {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

}  // namespace relaysim
