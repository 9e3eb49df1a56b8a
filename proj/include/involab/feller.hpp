#pragma once

// The Feller coupling sampler and its derived quantities.
//
// beta_1, beta_2, ... are independent Bernoulli with P(beta_j = 1) =
// theta/(theta+j-1); beta_1 = 1 surely. The window cycle counts c^(n) are the
// k-spacings of 1 beta_2 .. beta_n 1, and the truncated limit process Z_0
// collects the k-spacings of beta_1 .. beta_M.
//
// Success positions get sparse beyond the first few hundred indices, so the
// sampler scans Bernoullis only up to a threshold and then jumps from one
// success directly to the next by inverting the exact survival function
//   P(no success in (c, q]) = exp(h(q) - h(c)),  h(x) = lgamma(x) - lgamma(theta+x),
// which keeps a draw at n = 10^7 as cheap as one at n = 10^4.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "involab/cycle_type.hpp"
#include "involab/esf.hpp"
#include "involab/rng.hpp"

namespace involab {

struct SpacingSample {
    std::int64_t n = 0;
    std::int64_t horizon = 0;                 // M; Bernoullis decided through M
    double theta = 1.0;
    std::vector<std::int64_t> ones_positions;  // success positions <= M (always starts with 1)
    CycleType c;                               // window counts C^(n)
    SparseCounts z;                            // k-spacings closed within [1, M]

    std::int64_t left_gap() const {  // L_n = n + 1 - (last success <= n)
        std::int64_t last = 1;
        for (auto p : ones_positions) {
            if (p > n) break;
            last = p;
        }
        return n + 1 - last;
    }
    // R_n = (first success > n) - n, when that success lands within the horizon
    std::optional<std::int64_t> right_gap() const {
        for (auto p : ones_positions)
            if (p > n) return p - n;
        return std::nullopt;
    }
    // k-spacings with both endpoints beyond n (truncated Z_n)
    SparseCounts z_after_n() const {
        SparseCounts out;
        std::int64_t prev = -1;
        for (auto p : ones_positions) {
            if (p <= n) continue;
            if (prev > 0) out.add(p - prev, 1);
            prev = p;
        }
        return out;
    }
};

namespace detail {

inline double survival_log(double theta, std::int64_t x) {
    return std::lgamma(static_cast<double>(x)) - std::lgamma(theta + static_cast<double>(x));
}

// Smallest q > cursor with h(q) < target, or nullopt if even h(limit) >= target.
inline std::optional<std::int64_t> next_success_skip(double theta, std::int64_t cursor,
                                                     double h_cursor, double log_u,
                                                     std::int64_t limit) {
    const double target = h_cursor + log_u;
    std::int64_t lo = cursor;  // h(lo) >= target (log_u <= 0)
    std::int64_t hi = cursor + 1;
    double h_hi = survival_log(theta, hi);
    while (h_hi >= target) {
        if (hi >= limit) return std::nullopt;
        lo = hi;
        hi = std::min(limit, cursor + 2 * (hi - cursor));
        h_hi = survival_log(theta, hi);
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (survival_log(theta, mid) < target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace detail

inline constexpr std::int64_t kDefaultScanLimit = 1024;

// Positions of successes in beta_1..beta_limit. Per-index Bernoulli draws up
// to scan_limit, survival-inversion jumps beyond. Deterministic per Rng state.
inline std::vector<std::int64_t> feller_success_positions(std::int64_t limit, double theta,
                                                          Rng& rng,
                                                          std::int64_t scan_limit = kDefaultScanLimit) {
    std::vector<std::int64_t> ones{1};
    const std::int64_t scan_to = std::min(limit, scan_limit);
    for (std::int64_t j = 2; j <= scan_to; ++j)
        if (rng.bernoulli(theta / (theta + static_cast<double>(j - 1)))) ones.push_back(j);
    std::int64_t cursor = scan_to;
    double h_cursor = detail::survival_log(theta, cursor);
    while (cursor < limit) {
        const double log_u = std::log(rng.next_unit());
        auto q = detail::next_success_skip(theta, cursor, h_cursor, log_u, limit);
        if (!q) break;
        ones.push_back(*q);
        cursor = *q;
        h_cursor = detail::survival_log(theta, cursor);
    }
    return ones;
}

// Exact-arithmetic variant for distribution-exactness tests: every Bernoulli
// is decided by integer comparison against the rational theta/(theta+j-1).
inline std::vector<std::int64_t> feller_success_positions_exact(std::int64_t limit,
                                                                const ESFParams& params, Rng& rng) {
    const auto num = numerator(params.theta).convert_to<std::uint64_t>();
    const auto den = denominator(params.theta).convert_to<std::uint64_t>();
    std::vector<std::int64_t> ones{1};
    for (std::int64_t j = 2; j <= limit; ++j) {
        // p_j = num / (num + den*(j-1))
        if (rng.bernoulli_exact(num, num + den * static_cast<std::uint64_t>(j - 1)))
            ones.push_back(j);
    }
    return ones;
}

inline SpacingSample make_spacing_sample(std::int64_t n, std::int64_t horizon, double theta,
                                         std::vector<std::int64_t> ones) {
    SparseCounts window;
    std::int64_t prev = 1;
    for (auto p : ones) {
        if (p > n) break;
        if (p == 1) continue;
        window.add(p - prev, 1);
        prev = p;
    }
    window.add(n + 1 - prev, 1);
    SparseCounts z;
    for (std::size_t i = 1; i < ones.size(); ++i) z.add(ones[i] - ones[i - 1], 1);
    SpacingSample s;
    s.n = n;
    s.horizon = horizon;
    s.theta = theta;
    s.ones_positions = std::move(ones);
    s.c = CycleType(n, std::move(window));
    s.z = std::move(z);
    return s;
}

inline SpacingSample feller_sample(std::int64_t n, double theta, std::int64_t horizon_factor,
                                   Rng& rng, std::int64_t scan_limit = kDefaultScanLimit) {
    if (n < 1) throw std::invalid_argument("feller_sample: n must be positive");
    if (horizon_factor < 1) throw std::invalid_argument("feller_sample: horizon_factor must be >= 1");
    const std::int64_t horizon = horizon_factor * n;
    return make_spacing_sample(n, horizon, theta,
                               feller_success_positions(horizon, theta, rng, scan_limit));
}

inline SpacingSample feller_sample_exact(std::int64_t n, const ESFParams& params,
                                         std::int64_t horizon_factor, Rng& rng) {
    if (n < 1) throw std::invalid_argument("feller_sample: n must be positive");
    const std::int64_t horizon = horizon_factor * n;
    return make_spacing_sample(n, horizon, params.theta_real,
                               feller_success_positions_exact(horizon, params, rng));
}

// log V_m(k) in double precision via the same ratio recurrence as
// invol_hermite; rescaled on the fly so huge multiplicities cannot overflow.
inline double log_v_factor(std::int64_t m, std::int64_t k) {
    if (m < 2) return 0.0;
    double w_prev = 1.0, w = 1.0, log_scale = 0.0;
    for (std::int64_t j = 2; j <= m; ++j) {
        const double w_next = w + (static_cast<double>(j - 1) / static_cast<double>(k)) * w_prev;
        w_prev = w;
        w = w_next;
        if (w > 1e250) {
            w *= 1e-250;
            w_prev *= 1e-250;
            log_scale += 250.0 * std::log(10.0);
        }
    }
    return std::log(w) + log_scale;
}

// log invol_j(v) = sum_{k<=j} [ v_k log k + log V_{v_k}(k) ]
inline double log_invol_counts(const SparseCounts& v, std::int64_t j_limit) {
    double s = 0.0;
    for (const auto& [k, c] : v.kv) {
        if (k > j_limit) break;
        s += static_cast<double>(c) * std::log(static_cast<double>(k)) + log_v_factor(c, k);
    }
    return s;
}

inline double log_big_b_counts(const SparseCounts& v, std::int64_t j_limit) {
    double s = 0.0;
    for (const auto& [k, c] : v.kv) {
        if (k > j_limit) break;
        s += static_cast<double>(c) * std::log(static_cast<double>(k));
    }
    return s;
}

// membership in P_xi: multiplicities capped at xi, lengths beyond xi distinct
inline bool in_typical_set(const SparseCounts& v, std::int64_t xi) {
    for (const auto& [k, c] : v.kv) {
        if (c > xi) return false;
        if (k > xi && c > 1) return false;
    }
    return true;
}

// Uniform random involution of [n] via the telephone-number recurrence:
// the largest unplaced element is fixed with probability t_{m-1}/t_m, else
// paired with a uniform other unplaced element.
class InvolutionSampler {
  public:
    explicit InvolutionSampler(std::int64_t n) : n_(n), fix_prob_(static_cast<std::size_t>(n + 1)) {
        if (n < 0) throw std::invalid_argument("InvolutionSampler: n must be non-negative");
        if (n >= 1) fix_prob_[1] = 1.0;
        for (std::int64_t m = 2; m <= n; ++m)
            fix_prob_[static_cast<std::size_t>(m)] =
                1.0 / (1.0 + static_cast<double>(m - 1) * fix_prob_[static_cast<std::size_t>(m - 1)]);
    }

    Permutation sample(Rng& rng) const {
        std::vector<std::int32_t> image(static_cast<std::size_t>(n_));
        std::vector<std::int32_t> pool(static_cast<std::size_t>(n_));
        for (std::int32_t i = 0; i < n_; ++i) pool[static_cast<std::size_t>(i)] = i;
        while (!pool.empty()) {
            const std::int32_t x = pool.back();
            pool.pop_back();
            const auto m = static_cast<std::int64_t>(pool.size()) + 1;
            if (m == 1 || rng.next_unit() <= fix_prob_[static_cast<std::size_t>(m)]) {
                image[static_cast<std::size_t>(x)] = x;
            } else {
                const auto idx = static_cast<std::size_t>(rng.below(pool.size()));
                const std::int32_t y = pool[idx];
                pool[idx] = pool.back();
                pool.pop_back();
                image[static_cast<std::size_t>(x)] = y;
                image[static_cast<std::size_t>(y)] = x;
            }
        }
        return Permutation(std::move(image));
    }

  private:
    std::int32_t n_;
    std::vector<double> fix_prob_;
};

inline Permutation sample_uniform_involution(std::int64_t n, Rng& rng) {
    return InvolutionSampler(n).sample(rng);
}

// b o a: apply a first (sigma = tau2 o tau1 convention)
inline Permutation compose_involutions(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("compose_involutions: size mismatch");
    if (!a.is_involution() || !b.is_involution())
        throw std::invalid_argument("compose_involutions: inputs must be involutions");
    std::vector<std::int32_t> image(static_cast<std::size_t>(a.size()));
    for (std::int32_t i = 0; i < a.size(); ++i) image[static_cast<std::size_t>(i)] = b(a(i));
    return Permutation(std::move(image));
}

}  // namespace involab
