#pragma once

// Closed-form asymptotics and the special functions they need: the mean and
// second-moment growth laws, Wright's saddle-point leading term, the Mellin
// singular expansions of log G near z = 1, typical-value (skew) bounds, and
// the lognormal-CLT normalizers.

#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "involab/numeric.hpp"

namespace involab {

struct AsymptoticEstimate {
    Real value;
    BigRat claimed_error_exponent;  // e.g. -1/2 for relative error O(n^{-1/2})
};

inline Real pi_real() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

// dilogarithm on [0, 1]: defining series for x <= 1/2, Euler reflection
// Li2(x) + Li2(1-x) = pi^2/6 - log(x)log(1-x) for x in (1/2, 1), pi^2/6 at 1
inline Real li2(const Real& x) {
    if (x < 0 || x > 1) throw std::invalid_argument("li2: argument must lie in [0,1]");
    if (x == 0) return Real(0);
    if (x == 1) return pi_real() * pi_real() / 6;
    if (x > Real(0.5)) return pi_real() * pi_real() / 6 - log(x) * log(1 - x) - li2(1 - x);
    Real sum = 0, pow = 1;
    const Real eps("1e-45");
    for (std::int64_t n = 1;; ++n) {
        pow *= x;
        const Real term = pow / (static_cast<double>(n) * static_cast<double>(n));
        sum += term;
        if (term < eps * sum) break;
    }
    return sum;
}

// E_n invol asymptotic:
//   theta^{(1-theta^2)/4} Gamma(theta) / (2^{theta^2/2+1} e^{theta/2} sqrt(pi))
//     * e^{2 sqrt(theta n)} n^{theta^2/4 - theta + 1/4},  rel. error O(n^{-1/2})
inline AsymptoticEstimate mean_asym(std::int64_t n, const Real& theta) {
    if (n < 1 || theta <= 0) throw std::invalid_argument("mean_asym: need n >= 1, theta > 0");
    const Real th2 = theta * theta;
    const Real nn(static_cast<double>(n));
    const Real c = pow(theta, (1 - th2) / 4) * tgamma(theta) /
                   (pow(Real(2), th2 / 2 + 1) * exp(theta / 2) * sqrt(pi_real()));
    return {c * exp(2 * sqrt(theta * nn)) * pow(nn, th2 / 4 - theta + Real(0.25)), BigRat(-1, 2)};
}

// [z^n] (1-z)^beta phi(z) exp(alpha/(1-z)) ~
//   n^{-beta/2-3/4} e^{2 sqrt(alpha n)} / (2 sqrt(pi)) * phi(1) e^{alpha/2} alpha^{beta/2+1/4}
inline Real wright_leading(std::int64_t n, const Real& alpha, const Real& beta, const Real& phi_at_1) {
    if (alpha <= 0) throw std::invalid_argument("wright_leading: alpha must be positive");
    const Real nn(static_cast<double>(n));
    return pow(nn, -beta / 2 - Real(0.75)) * exp(2 * sqrt(alpha * nn)) / (2 * sqrt(pi_real())) *
           phi_at_1 * exp(alpha / 2) * pow(alpha, beta / 2 + Real(0.25));
}

// K_theta = prod_{k>=2} (1 - theta^{2-2k})^{-1/2} exp(k/(theta^{k-1}-1)),
// truncated once the k-th log factor drops below 1e-30 (geometric tail).
inline Real second_moment_front_constant(const Real& theta) {
    if (theta <= 1) throw std::invalid_argument("K_theta is defined for theta > 1");
    Real log_k = 0;
    const Real cut("1e-30");
    Real tk = theta;  // theta^{k-1}
    for (std::int64_t k = 2;; ++k) {
        const Real term = -log(1 - 1 / (tk * tk)) / 2 + static_cast<double>(k) / (tk - 1);
        log_k += term;
        if (term < cut) break;
        tk *= theta;
    }
    return exp(log_k);
}

// E_n invol^2 in its three regimes. The theta > 1 law carries relative error
// O(n^{-1/2}); the theta <= 1 laws carry O(n^{-1/3}).
inline AsymptoticEstimate second_moment_asym(std::int64_t n, const Real& theta) {
    if (n < 1 || theta <= 0) throw std::invalid_argument("second_moment_asym: need n >= 1, theta > 0");
    const Real nn(static_cast<double>(n));
    const Real pi = pi_real();
    if (theta > 1) {
        const Real K = second_moment_front_constant(theta);
        const Real v = K * tgamma(theta) / (2 * sqrt(2 * pi)) * pow(theta, static_cast<double>(n)) *
                       exp(2 * sqrt(nn) - Real(0.5)) * pow(nn, Real(0.5) - theta);
        return {v, BigRat(-1, 2)};
    }
    if (theta == 1) {
        // [z^n] G from the singular expansion
        //   log G = pi^2/(6w^2) - (pi^2+4)/(8w) + (1/4)log w + 7/24 - pi^2/144 - (1/4)log pi
        // (w = 1-z) assembled by the saddle-point leading term; equals E_n invol^2.
        const Real N3 = pow(3 * nn / (pi * pi), Real(1) / 3);
        const Real v = pow(Real(2), Real(0.25)) * exp(Real(1) / 24) / pow(pi, Real(0.25)) *
                       pow(6 * nn, Real(-0.75)) *
                       exp(pow(3 * pi * nn, Real(2) / 3) / 2 + (pi * pi - 12) / 24 * N3);
        return {v, BigRat(-1, 3)};
    }
    const Real L = li2(theta);
    const Real L2 = li2(theta * theta);
    const Real N = pow(nn / (2 * L), Real(1) / 3);
    const Real v = pow(1 - theta * theta, Real(0.25)) * pow(2 * L, Real(1) / 6) * tgamma(theta) *
                   pow(nn, Real(1) / 3 - theta) / sqrt(6 * pi) *
                   exp(3 * L * N * N + L2 / 4 * N - theta / (12 * (1 - theta)));
    return {v, BigRat(-1, 3)};
}

// L(t) = log G(e^{-t}) as the harmonic sum
//   sum_l [ theta^{2l}/(2l) e^{-2lt}/(1-e^{-2lt}) + theta^l e^{-lt}/(1-e^{-lt})^2 ]
inline Real mellin_lhs(const Real& t, const Real& theta) {
    if (t <= 0 || theta <= 0 || theta > 1)
        throw std::invalid_argument("mellin_lhs: need t > 0 and 0 < theta <= 1");
    const Real q = exp(-t);
    const Real cut("1e-30");
    Real sum = 0, ql = 1, thl = 1;
    for (std::int64_t l = 1;; ++l) {
        ql *= q;
        thl *= theta;
        const Real q2l = ql * ql;
        const Real th2l = thl * thl;
        const Real term = th2l / (2 * static_cast<double>(l)) * q2l / (1 - q2l) +
                          thl * ql / ((1 - ql) * (1 - ql));
        sum += term;
        if (term < cut * (1 + sum)) break;
    }
    return sum;
}

// Singular expansion of L(t) as t -> 0+, through the constant term. For
// theta < 1 this is Li2(theta)/t^2 + Li2(theta^2)/(4t) + (1/4)log(1-theta^2)
// - theta/(12(1-theta)); at theta = 1 the s = 0 double pole of
// 2^{-s-1} zeta(s+1) zeta(s) Gamma(s) contributes (1/4)log t - (1/4)log pi,
// the simple parts give (pi^2-12)/(24 t) and 1/24.
inline Real mellin_expansion(const Real& t, const Real& theta) {
    if (t <= 0 || theta <= 0 || theta > 1)
        throw std::invalid_argument("mellin_expansion: need t > 0 and 0 < theta <= 1");
    const Real pi = pi_real();
    if (theta == 1)
        return pi * pi / (6 * t * t) + (pi * pi - 12) / (24 * t) + log(t) / 4 - log(pi) / 4 +
               Real(1) / 24;
    return li2(theta) / (t * t) + li2(theta * theta) / (4 * t) + log(1 - theta * theta) / 4 -
           theta / (12 * (1 - theta));
}

// E_n(invol | K = m) ~ n^m / (m! log^{m-1} n)
inline Real conditional_mean_asym(std::int64_t n, std::int64_t m) {
    if (n < 3 || m < 1) throw std::invalid_argument("conditional_mean_asym: need n >= 3, m >= 1");
    const Real nn(static_cast<double>(n));
    Real mfact = 1;
    for (std::int64_t i = 2; i <= m; ++i) mfact *= static_cast<double>(i);
    return pow(nn, static_cast<double>(m)) / (mfact * pow(log(nn), static_cast<double>(m - 1)));
}

// ---- typical-value bounds ---------------------------------------------------

struct SkewBound {
    double log_bound;       // log of (xi2!)^{xi1-1} ceil(H_n + xi1 s_n)! e^{xi1^2 H_{xi2}/2}
    double prob_guarantee;  // 2 - 1/xi1^2 - exp(15/(xi1+1)! + 3/xi2)
};

inline double harmonic_number(std::int64_t n) {
    double h = 0;
    for (std::int64_t j = 1; j <= n; ++j) h += 1.0 / static_cast<double>(j);
    return h;
}

// s_n^2 = 2 sum_{j<n} H_j/(j+1) - H_n(H_n - 1), evaluated by the defining sums
inline double cycle_count_sd(std::int64_t n) {
    double h = 0, s = 0;
    for (std::int64_t j = 1; j < n; ++j) {
        h += 1.0 / static_cast<double>(j);  // H_j
        s += h / static_cast<double>(j + 1);
    }
    const double hn = h + 1.0 / static_cast<double>(n);
    return std::sqrt(2 * s - hn * (hn - 1));
}

inline SkewBound skew_bound(std::int64_t n, std::int64_t xi1, std::int64_t xi2) {
    if (xi1 < 20) throw std::invalid_argument("skew_bound: requires xi1 >= 20");
    if (xi1 > n) throw std::invalid_argument("skew_bound: requires xi1 <= n");
    if (xi2 < 1) throw std::invalid_argument("skew_bound: requires xi2 >= 1");
    const double hn = harmonic_number(n);
    const double sn = cycle_count_sd(n);
    if (static_cast<double>(xi2) > hn + static_cast<double>(xi1) * sn)
        throw std::invalid_argument("skew_bound: requires xi2 <= H_n + xi1 s_n");
    const std::int64_t tri = xi2 * (xi2 + 1) / 2;
    if (xi1 * tri >= n)
        throw std::invalid_argument("skew_bound: requires xi1 * T_{xi2} < n");
    const double xi3 = std::ceil(hn + static_cast<double>(xi1) * sn);
    const double log_bound = static_cast<double>(xi1 - 1) * std::lgamma(static_cast<double>(xi2) + 1) +
                             std::lgamma(xi3 + 1) +
                             0.5 * static_cast<double>(xi1) * static_cast<double>(xi1) *
                                 harmonic_number(xi2);
    const double small_fact = std::exp(std::log(15.0) - std::lgamma(static_cast<double>(xi1) + 2));
    const double guarantee =
        2.0 - 1.0 / (static_cast<double>(xi1) * static_cast<double>(xi1)) -
        std::exp(small_fact + 3.0 / static_cast<double>(xi2));
    return {log_bound, guarantee};
}

// log of the one-parameter (xi1 = xi2 = xi) bound, factorials replaced by
// their Robbins-Stirling estimates and H_n, s_n by elementary bounds
//   (2pi)^{xi/2} xi^{(3/2)xi^2} e^{xi^2/2 + xi} (log n + xi sqrt(log n) + 2)^{log n + xi sqrt(log n) + 5/2}
inline double symmetric_skew_log_bound(std::int64_t n, std::int64_t xi) {
    if (xi < 1 || static_cast<double>(xi) * xi * xi >= 2.0 * static_cast<double>(n))
        throw std::invalid_argument("symmetric_skew_log_bound: requires xi^3 < 2n");
    const double x = static_cast<double>(xi);
    const double ln = std::log(static_cast<double>(n));
    const double base = ln + x * std::sqrt(ln) + 2.0;
    return 0.5 * x * std::log(2 * M_PI) + 1.5 * x * x * std::log(x) + 0.5 * x * x + x +
           (base + 0.5) * std::log(base);
}

// ---- CLT normalizers ---------------------------------------------------------

struct Normalizers {
    double mu;     // sum_{k<=n} theta log k / k
    double sigma;  // sqrt( sum_{k<=n} theta log^2 k / k )
};

inline Normalizers normalizers(std::int64_t n, double theta) {
    if (n < 1) throw std::invalid_argument("normalizers: n must be positive");
    double mu = 0, s2 = 0;
    for (std::int64_t k = 2; k <= n; ++k) {
        const double lk = std::log(static_cast<double>(k)) / static_cast<double>(k);
        mu += lk;
        s2 += lk * std::log(static_cast<double>(k));
    }
    return {theta * mu, std::sqrt(theta * s2)};
}

inline double phi_normal(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// 3^{3/2}/(24 sqrt(2 pi)) (1-x^2) e^{-x^2/2} / sqrt(log n); theta = 1 refinement
inline double edgeworth_term(double x, double n_value) {
    if (!(n_value >= 3)) throw std::invalid_argument("edgeworth_term: need n >= 3");
    static const double c = std::pow(3.0, 1.5) / (24.0 * std::sqrt(2.0 * M_PI));
    return c * (1.0 - x * x) * std::exp(-x * x / 2) / std::sqrt(std::log(n_value));
}

}  // namespace involab
