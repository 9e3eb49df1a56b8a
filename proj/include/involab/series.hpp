#pragma once

// Truncated power-series algebra over a pluggable coefficient domain (exact
// rationals or 133-bit reals), plus the generating series driving the exact
// moment computations:
//
//   F(z)    = exp(theta z/(1-z)) / (1-z^2)^{theta^2/2}      (mean)
//   G(z)    = prod_k (1-theta^2 z^{2k})^{-1/2} exp(theta k z^k/(1-theta z^k))
//             (second moment; built through its exp-log form)
//   F(u,z)  = exp(u z/(1-z) + (u^2/2) log 1/(1-z^2))        (cycle-marked, theta=1)
//
// plus the constrained-multiplicity membership series and Stirling numbers.
//
// The real domain runs on raw MPFR fused multiply-adds: the O(N^2) exp
// recurrence at N = 10^4 stays in seconds. Every recurrence here has
// non-negative inputs for the series we build, so there is no catastrophic
// cancellation to amplify rounding.

#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "involab/esf.hpp"
#include "involab/numeric.hpp"

namespace involab {

struct RationalDomain {
    using value = BigRat;
    static value zero() { return BigRat(0); }
    static value one() { return BigRat(1); }
    static value from_rat(const BigRat& r) { return r; }
    static void fma(value& acc, const value& a, const value& b) { acc += a * b; }
    static void div_ui(value& v, std::int64_t n) { v /= n; }
    static bool is_zero(const value& v) { return v == 0; }
};

struct RealDomain {
    using value = Real;
    static value zero() { return Real(0); }
    static value one() { return Real(1); }
    static value from_rat(const BigRat& r) { return to_real(r); }
    static void fma(value& acc, const value& a, const value& b) {
        mpfr_fma(acc.backend().data(), a.backend().data(), b.backend().data(),
                 acc.backend().data(), MPFR_RNDN);
    }
    static void div_ui(value& v, std::int64_t n) {
        mpfr_div_ui(v.backend().data(), v.backend().data(), static_cast<unsigned long>(n), MPFR_RNDN);
    }
    static bool is_zero(const value& v) { return v == 0; }
};

template <class D>
class TruncatedSeries {
  public:
    using value = typename D::value;

    TruncatedSeries() = default;
    explicit TruncatedSeries(std::size_t order) : c_(order + 1, D::zero()) {}
    TruncatedSeries(std::vector<value> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) throw std::invalid_argument("series needs at least the constant term");
    }

    std::size_t order() const { return c_.size() - 1; }
    const value& operator[](std::size_t i) const { return c_[i]; }
    value& operator[](std::size_t i) { return c_[i]; }
    const std::vector<value>& coeffs() const { return c_; }

    TruncatedSeries& operator+=(const TruncatedSeries& o) {
        check_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    TruncatedSeries& operator-=(const TruncatedSeries& o) {
        check_order(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }

    friend TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
        a.check_order(b);
        const std::size_t N = a.order();
        TruncatedSeries out(N);
        for (std::size_t n = 0; n <= N; ++n)
            for (std::size_t j = 0; j <= n; ++j)
                if (!D::is_zero(a.c_[j])) D::fma(out.c_[n], a.c_[j], b.c_[n - j]);
        return out;
    }

  private:
    void check_order(const TruncatedSeries& o) const {
        if (c_.size() != o.c_.size()) throw std::invalid_argument("series order mismatch");
    }
    std::vector<value> c_;
};

using RationalSeries = TruncatedSeries<RationalDomain>;
using RealSeries = TruncatedSeries<RealDomain>;

// exp of a series with zero constant term: E_n = (1/n) sum_{j=1}^n j s_j E_{n-j}
template <class D>
TruncatedSeries<D> series_exp(const TruncatedSeries<D>& s) {
    if (!D::is_zero(s[0]))
        throw std::invalid_argument("series_exp: constant term must vanish in this domain");
    const std::size_t N = s.order();
    std::vector<typename D::value> a(N + 1, D::zero());
    for (std::size_t j = 1; j <= N; ++j) {
        a[j] = s[j];
        a[j] *= static_cast<std::int64_t>(j);
    }
    TruncatedSeries<D> e(N);
    e[0] = D::one();
    for (std::size_t n = 1; n <= N; ++n) {
        auto& acc = e[n];
        for (std::size_t j = 1; j <= n; ++j)
            if (!D::is_zero(a[j])) D::fma(acc, a[j], e[n - j]);
        D::div_ui(acc, static_cast<std::int64_t>(n));
    }
    return e;
}

// real-domain overload handling arbitrary constant term as e^{s0} exp(s - s0)
inline RealSeries series_exp_real(const RealSeries& s) {
    RealSeries shifted = s;
    const Real s0 = s[0];
    shifted[0] = Real(0);
    RealSeries e = series_exp(shifted);
    if (s0 != 0) {
        const Real scale = exp(s0);
        for (std::size_t i = 0; i <= e.order(); ++i) e[i] *= scale;
    }
    return e;
}

// log of a series with constant term 1: L_n = s_n - (1/n) sum_{j<n} j L_j s_{n-j}
template <class D>
TruncatedSeries<D> series_log(const TruncatedSeries<D>& s) {
    if (s[0] != D::one()) throw std::invalid_argument("series_log: constant term must be 1");
    const std::size_t N = s.order();
    TruncatedSeries<D> l(N);
    for (std::size_t n = 1; n <= N; ++n) {
        auto acc = D::zero();
        for (std::size_t j = 1; j < n; ++j) {
            if (D::is_zero(l[j]) || D::is_zero(s[n - j])) continue;
            auto t = l[j];
            t *= static_cast<std::int64_t>(j);
            D::fma(acc, t, s[n - j]);
        }
        D::div_ui(acc, static_cast<std::int64_t>(n));
        l[n] = s[n];
        l[n] -= acc;
    }
    return l;
}

// s^r for rational r, constant term 1: n P_n = sum_j ((r+1) j - n) s_j P_{n-j}
template <class D>
TruncatedSeries<D> series_pow(const TruncatedSeries<D>& s, const BigRat& r) {
    if (s[0] != D::one()) throw std::invalid_argument("series_pow: constant term must be 1");
    const std::size_t N = s.order();
    const auto rp1 = D::from_rat(r + 1);
    TruncatedSeries<D> p(N);
    p[0] = D::one();
    for (std::size_t n = 1; n <= N; ++n) {
        auto& acc = p[n];
        for (std::size_t j = 1; j <= n; ++j) {
            if (D::is_zero(s[j])) continue;
            auto coef = rp1;
            coef *= static_cast<std::int64_t>(j);
            coef -= static_cast<std::int64_t>(n);
            if (D::is_zero(coef)) continue;
            auto t = s[j];
            t *= coef;
            D::fma(acc, t, p[n - j]);
        }
        D::div_ui(acc, static_cast<std::int64_t>(n));
    }
    return p;
}

// ---- generating series -----------------------------------------------------

// log F has the closed-form coefficients theta + 1{k even} theta^2/k.
template <class D>
TruncatedSeries<D> mean_gf_log(const typename D::value& theta, std::size_t N) {
    TruncatedSeries<D> l(N);
    auto theta2 = theta;
    theta2 *= theta;
    for (std::size_t k = 1; k <= N; ++k) {
        l[k] = theta;
        if (k % 2 == 0) {
            auto t = theta2;
            D::div_ui(t, static_cast<std::int64_t>(k));
            l[k] += t;
        }
    }
    return l;
}

template <class D>
TruncatedSeries<D> mean_generating_series(const typename D::value& theta, std::size_t N) {
    return series_exp(mean_gf_log<D>(theta, N));
}

// log G(z) = sum over l >= 1 of [ theta^{2l}/(2l) z^{2l}/(1-z^{2l})
//                               + theta^l z^l/(1-z^l)^2 ],
// accumulated here as divisor sums; truncating factors at k = N is exact to
// order N since factor k only contributes from z^k on.
template <class D>
TruncatedSeries<D> second_gf_log(const typename D::value& theta, std::size_t N) {
    TruncatedSeries<D> g(N);
    auto theta_l = D::one();
    auto theta_2l = D::one();
    auto theta2 = theta;
    theta2 *= theta;
    for (std::size_t l = 1; l <= N; ++l) {
        theta_l *= theta;
        theta_2l *= theta2;
        if (2 * l <= N) {
            auto t = theta_2l;
            D::div_ui(t, static_cast<std::int64_t>(2 * l));
            for (std::size_t m = 2 * l; m <= N; m += 2 * l) g[m] += t;
        }
        for (std::size_t m = l; m <= N; m += l) {
            auto t = theta_l;
            t *= static_cast<std::int64_t>(m / l);
            g[m] += t;
        }
    }
    return g;
}

template <class D>
TruncatedSeries<D> second_moment_generating_series(const typename D::value& theta, std::size_t N) {
    return series_exp(second_gf_log<D>(theta, N));
}

// E_n invol = (n!/theta^(n)) [z^n] F
inline BigRat mean_invol_exact(std::int64_t n, const ESFParams& params) {
    if (n < 1) throw std::invalid_argument("mean_invol_exact: n must be positive");
    auto F = mean_generating_series<RationalDomain>(params.theta, static_cast<std::size_t>(n));
    return BigRat(factorial_big(n)) / rising_factorial(params.theta, n) *
           F[static_cast<std::size_t>(n)];
}

inline BigRat second_moment_exact(std::int64_t n, const ESFParams& params) {
    if (n < 1) throw std::invalid_argument("second_moment_exact: n must be positive");
    auto G = second_moment_generating_series<RationalDomain>(params.theta, static_cast<std::size_t>(n));
    return BigRat(factorial_big(n)) / rising_factorial(params.theta, n) *
           G[static_cast<std::size_t>(n)];
}

// n!/theta^(n) [z^n] S for a prebuilt real-domain series (large-n oracle path)
inline Real moment_from_series_real(const RealSeries& s, std::int64_t n, const Real& theta) {
    if (n < 1 || static_cast<std::size_t>(n) > s.order())
        throw std::invalid_argument("moment_from_series_real: n out of range");
    const Real log_ratio = lgamma(Real(n + 1)) - (lgamma(theta + n) - lgamma(theta));
    return exp(log_ratio) * s[static_cast<std::size_t>(n)];
}

// ---- membership series -----------------------------------------------------

// Generating series whose z^n coefficient times n!/theta^(n) is
// P_n(sigma in P_xi): multiplicities capped at xi for k <= xi, and lengths
// beyond xi allowed at most once.
inline RationalSeries membership_series(const ESFParams& params, std::int64_t xi, std::size_t N) {
    if (xi < 1) throw std::invalid_argument("membership_series: xi must be >= 1");
    RationalSeries acc(N);
    acc[0] = 1;
    std::vector<std::pair<std::size_t, BigRat>> factor;
    for (std::size_t k = 1; k <= N; ++k) {
        factor.clear();
        const BigRat base = params.theta / static_cast<std::int64_t>(k);
        if (static_cast<std::int64_t>(k) <= xi) {
            BigRat term = 1;
            factor.emplace_back(0, BigRat(1));
            for (std::int64_t j = 1; j <= xi && k * static_cast<std::size_t>(j) <= N; ++j) {
                term *= base;
                term /= j;
                factor.emplace_back(k * static_cast<std::size_t>(j), term);
            }
        } else {
            factor.emplace_back(0, BigRat(1));
            factor.emplace_back(k, base);
        }
        if (factor.size() == 1) continue;
        RationalSeries next(N);
        for (const auto& [deg, coef] : factor)
            for (std::size_t i = 0; i + deg <= N; ++i)
                if (acc[i] != 0) next[i + deg] += coef * acc[i];
        acc = std::move(next);
    }
    return acc;
}

inline BigRat membership_probability(std::int64_t n, const ESFParams& params, std::int64_t xi) {
    auto s = membership_series(params, xi, static_cast<std::size_t>(n));
    return BigRat(factorial_big(n)) / rising_factorial(params.theta, n) *
           s[static_cast<std::size_t>(n)];
}

// ---- Stirling numbers ------------------------------------------------------

// unsigned first kind, column recurrence [n m] = [n-1 m-1] + (n-1)[n-1 m]
inline BigInt stirling1(std::int64_t n, std::int64_t m) {
    if (m < 0 || m > n) throw std::invalid_argument("stirling1: need 0 <= m <= n");
    std::vector<BigInt> row(static_cast<std::size_t>(m + 1), BigInt(0));
    row[0] = 1;  // [0 0]
    for (std::int64_t i = 1; i <= n; ++i)
        for (std::int64_t j = std::min<std::int64_t>(m, i); j >= 0; --j) {
            BigInt v = (j > 0) ? row[static_cast<std::size_t>(j - 1)] : BigInt(0);
            row[static_cast<std::size_t>(j)] = v + (i - 1) * row[static_cast<std::size_t>(j)];
        }
    return row[static_cast<std::size_t>(m)];
}

// ---- bivariate cycle-marked series ----------------------------------------

// grid[m][n] = [u^m z^n] exp(u z/(1-z) + (u^2/2) log 1/(1-z^2)), exact.
struct BivariateTruncated {
    std::size_t M = 0, N = 0;
    std::vector<std::vector<BigRat>> grid;  // grid[m][n]
    const BigRat& at(std::size_t m, std::size_t n) const { return grid[m][n]; }
};

inline BivariateTruncated build_bivariate_cycle_series(std::size_t M, std::size_t N) {
    // X = u A + u^2 B, A = z/(1-z), B = (1/2) log 1/(1-z^2)
    std::vector<BigRat> A(N + 1, BigRat(0)), B(N + 1, BigRat(0));
    for (std::size_t k = 1; k <= N; ++k) A[k] = 1;
    for (std::size_t j = 1; 2 * j <= N; ++j) B[2 * j] = BigRat(1, 2 * static_cast<std::int64_t>(j));

    BivariateTruncated out;
    out.M = M;
    out.N = N;
    out.grid.assign(M + 1, std::vector<BigRat>(N + 1, BigRat(0)));
    out.grid[0][0] = 1;

    // term_j = X^j / j!, accumulated; X^j has u-degree >= j
    std::vector<std::vector<BigRat>> term(M + 1, std::vector<BigRat>(N + 1, BigRat(0)));
    term[0][0] = 1;
    for (std::size_t j = 1; j <= M; ++j) {
        std::vector<std::vector<BigRat>> next(M + 1, std::vector<BigRat>(N + 1, BigRat(0)));
        for (std::size_t mu = 0; mu < M; ++mu) {
            for (std::size_t n = 0; n <= N; ++n) {
                if (term[mu][n] == 0) continue;
                for (std::size_t i = 1; n + i <= N; ++i)  // times u A
                    next[mu + 1][n + i] += term[mu][n] * A[i];
                if (mu + 2 <= M)
                    for (std::size_t i = 2; n + i <= N; i += 2)  // times u^2 B
                        next[mu + 2][n + i] += term[mu][n] * B[i];
            }
        }
        for (std::size_t mu = 0; mu <= M; ++mu)
            for (std::size_t n = 0; n <= N; ++n) {
                next[mu][n] /= static_cast<std::int64_t>(j);
                out.grid[mu][n] += next[mu][n];
            }
        term = std::move(next);
    }
    return out;
}

// [u^m] F(u, z) in closed form:
//   sum_{k=ceil(m/2)}^{m} C(k, m-k)/(k! 2^{m-k}) (z/(1-z))^{2k-m} log^{m-k} 1/(1-z^2);
// m = 0 gives the constant series 1.
inline RationalSeries vertical_cycle_series(std::size_t m, std::size_t N) {
    RationalSeries out(N);
    if (m == 0) {
        out[0] = 1;
        return out;
    }
    RationalSeries A(N), L(N);
    for (std::size_t k = 1; k <= N; ++k) A[k] = 1;
    for (std::size_t j = 1; 2 * j <= N; ++j) L[2 * j] = BigRat(1, static_cast<std::int64_t>(j));
    auto power = [&](const RationalSeries& s, std::size_t e) {
        RationalSeries p(N);
        p[0] = 1;
        for (std::size_t i = 0; i < e; ++i) p = mul(p, s);
        return p;
    };
    for (std::size_t k = (m + 1) / 2; k <= m; ++k) {
        const BigRat coef =
            BigRat(binomial_big(static_cast<std::int64_t>(k), static_cast<std::int64_t>(m - k))) /
            (BigRat(factorial_big(static_cast<std::int64_t>(k))) *
             BigRat(BigInt(1) << (m - k)));
        auto piece = mul(power(A, 2 * k - m), power(L, m - k));
        for (std::size_t i = 0; i <= N; ++i) out[i] += coef * piece[i];
    }
    return out;
}

// E_n(invol | K = m) = [u^m z^n] F(u,z) / ([n m]/n!); theta-free by sufficiency of K.
inline BigRat conditional_mean_given_cycles(std::int64_t n, std::int64_t m) {
    if (m < 1 || m > n) throw std::invalid_argument("conditional_mean_given_cycles: need 1 <= m <= n");
    auto vert = vertical_cycle_series(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    return vert[static_cast<std::size_t>(n)] * BigRat(factorial_big(n)) / BigRat(stirling1(n, m));
}

}  // namespace involab
