#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

namespace crw {

/// SplitMix64 finaliser. This is the published mixing function used to derive
/// per-replica seeds, so independent workers agree on every stream.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for replica `index` of a run keyed by `master_seed`.
constexpr std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept {
        std::uint64_t z = seed;
        for (auto& w : s_) {
            z += 0x9E3779B97F4A7C15ULL;
            w = splitmix64(z);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1].
    double uniform_open0() noexcept {
        return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n) via the multiply-shift map on 32 high bits.
    std::uint32_t below(std::uint32_t n) noexcept {
        return static_cast<std::uint32_t>(((*this)() >> 32) * n >> 32);
    }

    double exponential(double rate) noexcept { return -std::log(uniform_open0()) / rate; }

private:
    std::uint64_t s_[4];
};

}  // namespace crw
