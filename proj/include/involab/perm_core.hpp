#pragma once

// Exact integer combinatorics of involution factorizations.
//
// invol(sigma) counts ordered pairs (tau1, tau2) of involutions with
// sigma = tau2 o tau1. It factors over cycle lengths:
//
//   invol(c) = B(c) * prod_k V_{c_k}(k),   V_m(k) = sum_{j<=m/2} (m)_{2j} / ((2k)^j j!)
//
// with B(c) the product of cycle lengths. All arithmetic here is exact.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "involab/cycle_type.hpp"
#include "involab/numeric.hpp"

namespace involab {

// V_m(k) as an exact rational, by the defining sum.
inline BigRat invol_cycle_factor(std::int64_t m, std::int64_t k) {
    BigRat sum = 0;
    BigInt fact_j = 1;
    BigRat pow_2k = 1;
    for (std::int64_t j = 0; 2 * j <= m; ++j) {
        if (j > 0) {
            fact_j *= j;
            pow_2k *= 2 * k;
        }
        sum += BigRat(falling_factorial(m, 2 * j)) / (pow_2k * fact_j);
    }
    return sum;
}

inline BigInt big_b(const CycleType& c) {
    BigInt out = 1;
    for (const auto& [k, ck] : c.counts().kv)
        for (std::int64_t i = 0; i < ck; ++i) out *= k;
    return out;
}

inline BigInt invol(const CycleType& c) {
    BigRat val = BigRat(big_b(c));
    for (const auto& [k, ck] : c.counts().kv) val *= invol_cycle_factor(ck, k);
    if (denominator(val) != 1) throw std::logic_error("invol: non-integral result");
    return numerator(val);
}

// Same quantity through the Hermite-polynomial form
//   invol(c) = prod_k k^{c_k} He_{c_k}(i sqrt k) / (i sqrt k)^{c_k}.
// Dividing the three-term recurrence He_m(x) = x He_{m-1}(x) - (m-1) He_{m-2}(x)
// by (i sqrt k)^m and using (i sqrt k)^2 = -k collapses the imaginary argument:
// with W_m = He_m(i sqrt k)/(i sqrt k)^m,
//   W_0 = W_1 = 1,   W_m = W_{m-1} + ((m-1)/k) W_{m-2},
// so only rational arithmetic remains.
inline BigInt invol_hermite(const CycleType& c) {
    BigRat val = 1;
    for (const auto& [k, ck] : c.counts().kv) {
        BigRat w_prev = 1, w = 1;  // W_0, W_1
        for (std::int64_t m = 2; m <= ck; ++m) {
            BigRat w_next = w + BigRat(m - 1, k) * w_prev;
            w_prev = w;
            w = w_next;
        }
        BigRat kpow = 1;
        for (std::int64_t i = 0; i < ck; ++i) kpow *= k;
        val *= kpow * w;
    }
    if (denominator(val) != 1) throw std::logic_error("invol_hermite: non-integral result");
    return numerator(val);
}

// telephone numbers t_n = #involutions of [n]
inline BigInt telephone(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("telephone: n must be non-negative");
    BigInt prev = 1, cur = 1;  // t_0, t_1
    if (n <= 1) return 1;
    for (std::int64_t m = 2; m <= n; ++m) {
        BigInt next = cur + (m - 1) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace detail {
inline void enumerate_involutions(std::vector<std::int32_t>& image, std::int32_t next,
                                  const std::function<void(const std::vector<std::int32_t>&)>& emit) {
    const auto n = static_cast<std::int32_t>(image.size());
    while (next < n && image[static_cast<std::size_t>(next)] >= 0) ++next;
    if (next == n) {
        emit(image);
        return;
    }
    image[static_cast<std::size_t>(next)] = next;  // fixed point
    enumerate_involutions(image, next + 1, emit);
    image[static_cast<std::size_t>(next)] = -1;
    for (std::int32_t j = next + 1; j < n; ++j) {
        if (image[static_cast<std::size_t>(j)] >= 0) continue;
        image[static_cast<std::size_t>(next)] = j;
        image[static_cast<std::size_t>(j)] = next;
        enumerate_involutions(image, next + 1, emit);
        image[static_cast<std::size_t>(next)] = -1;
        image[static_cast<std::size_t>(j)] = -1;
    }
}
}  // namespace detail

inline void for_each_involution(std::int64_t n,
                                const std::function<void(const std::vector<std::int32_t>&)>& emit) {
    std::vector<std::int32_t> image(static_cast<std::size_t>(n), -1);
    detail::enumerate_involutions(image, 0, emit);
}

inline constexpr std::int64_t kBruteForceDefaultCap = 8;

// Independent oracle: enumerate involutions tau1 and count those for which
// tau2 = p o tau1 is again an involution.
inline BigInt brute_force_invol(const Permutation& p, std::int64_t cap = kBruteForceDefaultCap) {
    const auto n = p.size();
    if (n > cap)
        throw std::invalid_argument("brute_force_invol: n exceeds cap " + std::to_string(cap) +
                                    " (raise the cap to force the enumeration)");
    std::int64_t count = 0;
    std::vector<std::int32_t> tau2(static_cast<std::size_t>(n));
    for_each_involution(n, [&](const std::vector<std::int32_t>& tau1) {
        for (std::size_t i = 0; i < tau2.size(); ++i)
            tau2[i] = p(tau1[i]);
        bool inv = true;
        for (std::size_t i = 0; i < tau2.size() && inv; ++i)
            inv = tau2[static_cast<std::size_t>(tau2[i])] == static_cast<std::int32_t>(i);
        if (inv) ++count;
    });
    return count;
}

inline BigInt conjugacy_class_size(const CycleType& c) {
    BigInt denom = 1;
    for (const auto& [k, ck] : c.counts().kv) {
        for (std::int64_t i = 0; i < ck; ++i) denom *= k;
        denom *= factorial_big(ck);
    }
    return factorial_big(c.n()) / denom;
}

// Streams every cycle type of S_n exactly once with its conjugacy class size.
inline void enumerate_cycle_types(std::int64_t n,
                                  const std::function<void(const CycleType&, const BigInt&)>& emit) {
    if (n < 1) throw std::invalid_argument("enumerate_cycle_types: n must be positive");
    SparseCounts sc;
    std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t rem, std::int64_t maxk) {
        if (rem == 0) {
            CycleType ct(n, sc);
            emit(ct, conjugacy_class_size(ct));
            return;
        }
        for (std::int64_t k = std::min(rem, maxk); k >= 1; --k) {
            for (std::int64_t c = rem / k; c >= 1; --c) {
                sc.add(k, c);
                rec(rem - k * c, k - 1);
                sc.add(k, -c);
            }
        }
    };
    rec(n, n);
}

}  // namespace involab
