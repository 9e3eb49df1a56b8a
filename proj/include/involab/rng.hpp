#pragma once

// Reproducible random streams. A sampler is a pure function of
// (seed, stream): stream s of seed g always yields the same draws, on any
// platform, regardless of how many workers consume other streams. xoshiro256**
// state is derived from (seed, stream) through SplitMix64.

#include <cstdint>

namespace involab {

struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
  public:
    explicit Rng(RngSeed rs) {
        std::uint64_t x = rs.seed ^ (rs.stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
        for (auto& w : s_) w = detail::splitmix64(x);
    }
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngSeed{seed, stream}) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on (0,1]; never 0, so it is safe as a division denominator
    double next_unit() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_unit() <= p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // Lemire rejection; unbiased
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t t = -n % n;
            while (lo < t) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Bernoulli(num/den) decided by exact integer comparison on a 64-bit
    // uniform grid: true iff U/2^64 < num/den.
    bool bernoulli_exact(std::uint64_t num, std::uint64_t den) {
        __uint128_t lhs = static_cast<__uint128_t>(next_u64()) * den;
        __uint128_t rhs = static_cast<__uint128_t>(num) << 64;
        return lhs < rhs;
    }

    std::uint64_t binomial_half(std::uint64_t m) {
        // Binomial(m, 1/2) by popcount over 64-bit words
        std::uint64_t acc = 0;
        while (m >= 64) {
            acc += static_cast<std::uint64_t>(__builtin_popcountll(next_u64()));
            m -= 64;
        }
        if (m > 0) acc += static_cast<std::uint64_t>(__builtin_popcountll(next_u64() >> (64 - m)));
        return acc;
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace involab
