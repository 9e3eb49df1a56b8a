#pragma once

// Arbitrary-precision integer/rational types and the extended-precision real
// used across the library. Exact paths run on GMP; real-domain work runs on
// MPFR with a 133-bit mantissa (>= the 128 bits the coefficient accuracy
// contract assumes).

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace involab {

using BigInt = boost::multiprecision::mpz_int;
using BigRat = boost::multiprecision::mpq_rational;

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<40, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

inline BigInt factorial_big(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("factorial of negative integer");
    BigInt out = 1;
    for (std::int64_t i = 2; i <= n; ++i) out *= i;
    return out;
}

// theta^(n) = theta (theta+1) ... (theta+n-1)
inline BigRat rising_factorial(const BigRat& theta, std::int64_t n) {
    BigRat out = 1;
    for (std::int64_t i = 0; i < n; ++i) out *= theta + i;
    return out;
}

// (x)_r = x (x-1) ... (x-r+1)
inline BigInt falling_factorial(std::int64_t x, std::int64_t r) {
    BigInt out = 1;
    for (std::int64_t i = 0; i < r; ++i) out *= (x - i);
    return out;
}

inline BigInt binomial_big(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    BigInt out = falling_factorial(n, k);
    return out / factorial_big(k);
}

// Parses "p/q", "p", or a decimal literal into an exact rational.
// Decimals map to the exact value of their digit string (not a binary double).
inline BigRat parse_rational(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt p(s.substr(0, slash));
        BigInt q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator in rational literal");
        return BigRat(p, q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return BigRat(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+")
        throw std::invalid_argument("malformed rational literal: " + s);
    BigInt num(digits);
    BigInt den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return BigRat(num, den);
}

inline std::string rational_to_string(const BigRat& r) {
    return r.str();
}

inline double to_double(const BigRat& r) { return r.convert_to<double>(); }
inline double to_double(const Real& r) { return r.convert_to<double>(); }
inline Real to_real(const BigRat& r) {
    return Real(numerator(r).str()) / Real(denominator(r).str());
}

}  // namespace involab
