#pragma once

// Ewens Sampling Formula: exact pmf over cycle types and the exact induced
// distribution of the Feller-coupling window process for small n.

#include <cstdint>
#include <map>
#include <stdexcept>

#include "involab/cycle_type.hpp"
#include "involab/numeric.hpp"

namespace involab {

struct ESFParams {
    BigRat theta;       // exact value, used by all rational paths
    double theta_real;  // the same value as a double, used by samplers

    static ESFParams from_rational(const BigRat& t) {
        if (t <= 0) throw std::invalid_argument("ESF parameter must be positive");
        return {t, t.convert_to<double>()};
    }
    // Doubles are dyadic rationals, so both fields carry the identical value.
    static ESFParams from_real(double t) {
        if (!(t > 0)) throw std::invalid_argument("ESF parameter must be positive");
        return {BigRat(t), t};
    }
};

// P(c_k = a_k for all k) = 1{sum k a_k = n} n!/theta^(n) prod (theta/k)^{a_k} / a_k!
inline BigRat esf_pmf(const SparseCounts& counts, std::int64_t n, const ESFParams& params) {
    for (const auto& [k, c] : counts.kv)
        if (k <= 0 || c < 0) throw std::invalid_argument("esf_pmf: malformed count vector");
    if (counts.weighted_sum() != n) return 0;
    BigRat p = BigRat(factorial_big(n)) / rising_factorial(params.theta, n);
    for (const auto& [k, c] : counts.kv) {
        BigRat f = params.theta / k;
        for (std::int64_t i = 0; i < c; ++i) p *= f;
        p /= factorial_big(c);
    }
    return p;
}

inline BigRat esf_pmf(const CycleType& c, const ESFParams& params) {
    return esf_pmf(c.counts(), c.n(), params);
}

inline constexpr std::int64_t kExactFellerCap = 12;

// Enumerates all beta_2..beta_n patterns of the coupling window 1 b2 .. bn 1
// and accumulates exact pattern probabilities into the induced cycle-type
// distribution. Matches ESF(theta) exactly (tested, not assumed).
inline std::map<SparseCounts, BigRat> exact_feller_distribution(std::int64_t n,
                                                                const ESFParams& params) {
    if (n < 1) throw std::invalid_argument("exact_feller_distribution: n must be positive");
    if (n > kExactFellerCap)
        throw std::invalid_argument("exact_feller_distribution: n > " +
                                    std::to_string(kExactFellerCap) +
                                    " would enumerate 2^(n-1) patterns; refusing");
    std::vector<BigRat> p_one(static_cast<std::size_t>(n + 1));
    for (std::int64_t j = 2; j <= n; ++j)
        p_one[static_cast<std::size_t>(j)] = params.theta / (params.theta + (j - 1));

    std::map<SparseCounts, BigRat> dist;
    const std::uint64_t patterns = 1ULL << (n - 1);
    for (std::uint64_t bits = 0; bits < patterns; ++bits) {
        BigRat prob = 1;
        SparseCounts sc;
        std::int64_t prev = 1;
        for (std::int64_t j = 2; j <= n; ++j) {
            const bool one = (bits >> (j - 2)) & 1u;
            const auto& pj = p_one[static_cast<std::size_t>(j)];
            prob *= one ? pj : 1 - pj;
            if (one) {
                sc.add(j - prev, 1);
                prev = j;
            }
        }
        sc.add(n + 1 - prev, 1);  // window closes with a forced success
        dist[sc] += prob;
    }
    return dist;
}

}  // namespace involab
