#pragma once
// Exact scalars, error types and small numeric helpers shared by every module.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace hybrid {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Bad input: wrong place kind, out-of-range exponent, malformed data.
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Valid input the library does not handle (e.g. disk transport under a non-polynomial map).
struct UnsupportedError : DomainError {
    using DomainError::DomainError;
};

// Numerical breakdown: singular systems, missing certificates, infinite integrands.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Rational rat(long long n, long long d = 1) { return Rational(n) / Rational(d); }

inline BigInt num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
    if (den(q) == 1) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

// Valuation of a nonzero integer at p.
inline long long vp_int(BigInt n, unsigned long p) {
    if (n == 0) throw DomainError("valuation of zero");
    if (n < 0) n = -n;
    long long v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline long long vp(const Rational& q, unsigned long p) {
    if (q == 0) throw DomainError("valuation of zero");
    return vp_int(num(q), p) - vp_int(den(q), p);
}

inline bool is_prime(unsigned long p) {
    if (p < 2) return false;
    for (unsigned long k = 2; k * k <= p; ++k)
        if (p % k == 0) return false;
    return true;
}

inline Rational floor_rat(const Rational& q) {
    BigInt n = num(q), d = den(q);
    BigInt f = n / d;
    if (n < 0 && f * d != n) f -= 1;
    return Rational(f);
}

inline Rational ceil_rat(const Rational& q) { return -floor_rat(-q); }

inline BigInt ipow(const BigInt& b, long long e) {
    BigInt r = 1;
    for (long long i = 0; i < e; ++i) r *= b;
    return r;
}

inline Rational rpow(const Rational& b, long long e) {
    if (e < 0) return Rational(1) / rpow(b, -e);
    Rational r = 1;
    for (long long i = 0; i < e; ++i) r *= b;
    return r;
}

// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational snap(double x, long long max_den = 1000000) {
    if (!std::isfinite(x)) throw DomainError("cannot snap a non-finite real");
    bool neg = x < 0;
    double a = std::fabs(x);
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = a;
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(frac);
        if (fl > 9e15) break;
        long long ai = static_cast<long long>(fl);
        long long q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        long long p2 = ai * p1 + p0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double rem = frac - fl;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) return Rational(0);
    Rational r = Rational(p1) / Rational(q1);
    return neg ? -r : r;
}

// Parses "a", "a/b", or a decimal literal (snapped to a nearby rational).
inline Rational parse_rational(const std::string& s_in) {
    std::string s;
    for (char c : s_in)
        if (c != ' ') s += c;
    if (s.empty()) throw DomainError("empty rational literal");
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            BigInt n(s.substr(0, slash));
            BigInt d(s.substr(slash + 1));
            if (d == 0) throw DomainError("zero denominator in '" + s_in + "'");
            return Rational(n) / Rational(d);
        }
        if (s.find_first_of(".eE") != std::string::npos) return snap(std::stod(s));
        return Rational(BigInt(s));
    } catch (const DomainError&) {
        throw;
    } catch (const std::exception&) {
        throw DomainError("malformed rational '" + s_in + "'");
    }
}

// Kahan-compensated accumulator.
struct KahanSum {
    double sum = 0, comp = 0;
    void add(double x) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

}  // namespace hybrid
