#pragma once
// Points of the fiber P^1: classical points, disk points eta_{a,r}, infinity.

#include "place.hpp"
#include "polynomial.hpp"

#include <complex>
#include <optional>
#include <string>

namespace hybrid {

struct BerkPoint {
    enum class Kind { Classical, Disk, Infinity };
    Kind kind = Kind::Classical;
    std::complex<double> z;    // archimedean classical coordinate
    std::optional<Rational> a; // exact classical coordinate or disk center
    Rational logr;             // disk log-radius, in place units

    static BerkPoint classical(const Rational& q) {
        BerkPoint x;
        x.kind = Kind::Classical;
        x.a = q;
        x.z = {to_double(q), 0.0};
        return x;
    }
    static BerkPoint classical(std::complex<double> w) {
        BerkPoint x;
        x.kind = Kind::Classical;
        x.z = w;
        return x;
    }
    static BerkPoint disk(const Rational& center, const Rational& logr) {
        BerkPoint x;
        x.kind = Kind::Disk;
        x.a = center;
        x.z = {to_double(center), 0.0};
        x.logr = logr;
        return x;
    }
    static BerkPoint infinity() {
        BerkPoint x;
        x.kind = Kind::Infinity;
        return x;
    }
    static BerkPoint gauss() { return disk(0, 0); }

    bool is_classical() const { return kind == Kind::Classical; }
    bool is_disk() const { return kind == Kind::Disk; }
    bool is_inf() const { return kind == Kind::Infinity; }
    bool exact() const { return kind == Kind::Infinity || a.has_value(); }
    const Rational& center() const {
        if (!a) throw DomainError("point has no exact coordinate");
        return *a;
    }
};

inline std::string to_string(const BerkPoint& x) {
    switch (x.kind) {
        case BerkPoint::Kind::Infinity: return "inf";
        case BerkPoint::Kind::Disk: return "eta(" + to_string(*x.a) + "," + to_string(x.logr) + ")";
        case BerkPoint::Kind::Classical:
            if (x.a) return to_string(*x.a);
            return std::to_string(x.z.real()) + (x.z.imag() < 0 ? "" : "+") + std::to_string(x.z.imag()) + "i";
    }
    return "?";
}

inline void check_fiber(const Place& y, const BerkPoint& x) {
    if (y.archimedean() && x.is_disk())
        throw DomainError("disk point " + to_string(x) + " in an archimedean fiber");
    if (y.ultrametric() && x.is_classical() && !x.a)
        throw DomainError("non-rational classical point in an ultrametric fiber");
}

// Log-radius of the smallest disk around a containing x (classical: -inf).
inline XRat radius_units(const BerkPoint& x) {
    if (x.is_disk()) return x.logr;
    return std::nullopt;
}

// log|T|(x) in units, ultrametric, x finite.
inline XRat log_abs_T_units(const Place& y, const BerkPoint& x) {
    return xmax(abs_log_units(y, x.center()), radius_units(x));
}

// Ultrametric seminorm of P at a finite point, exact.
inline XRat eval_units(const Place& y, const BerkPoint& x, const Poly& P) {
    if (P.zero()) return std::nullopt;
    if (x.is_classical()) return abs_log_units(y, P(x.center()));
    Poly S = P.taylor_shift(x.center());
    XRat best;
    for (int i = 0; i <= S.degree(); ++i) {
        if (S.c[i] == 0) continue;
        best = xmax(best, xadd(abs_log_units(y, S.c[i]), Rational(i) * x.logr));
    }
    return best;
}

inline LogMag eval_log_abs(const Place& y, const BerkPoint& x, const Poly& P) {
    check_fiber(y, x);
    if (P.zero()) return LogMag::neg_inf();
    if (x.is_inf()) {
        if (P.degree() >= 1) return LogMag::pos_inf();
        return abs_log(y, P.c[0]);
    }
    if (y.archimedean()) {
        std::complex<double> v = to_complex(P)(x.z);
        return LogMag::of_real(abs_log_complex(y, v));
    }
    return LogMag::of_units(eval_units(y, x, P), y.unit());
}

inline BerkPoint flow_point(const BerkPoint& x, const Rational& e) {
    if (e <= 0 || e > 1) throw DomainError("flow exponent must lie in (0,1]");
    if (!x.is_disk()) return x;
    return BerkPoint::disk(*x.a, x.logr * e);
}

// x lies in the closed disk D (D a disk point).
inline bool in_disk(const Place& y, const BerkPoint& x, const BerkPoint& D) {
    if (!D.is_disk()) throw DomainError("in_disk needs a disk point");
    if (x.is_inf()) return false;
    XRat r = radius_units(x);
    if (r && *r > D.logr) return false;
    XRat dist = abs_log_units(y, x.center() - D.center());
    return !dist || *dist <= D.logr;
}

// Place-aware equality of fiber points.
inline bool same_point(const Place& y, const BerkPoint& x, const BerkPoint& w) {
    if (x.kind != w.kind) return false;
    switch (x.kind) {
        case BerkPoint::Kind::Infinity: return true;
        case BerkPoint::Kind::Classical:
            if (x.a && w.a) return *x.a == *w.a;
            return std::abs(x.z - w.z) <= 1e-12 * (1 + std::abs(x.z));
        case BerkPoint::Kind::Disk: return x.logr == w.logr && in_disk(y, x, w);
    }
    return false;
}

// Smallest disk point containing both (the meet in the tree order).
inline BerkPoint join(const Place& y, const BerkPoint& x, const BerkPoint& w) {
    if (x.is_inf() || w.is_inf()) throw DomainError("join with infinity");
    XRat r = xmax(xmax(abs_log_units(y, x.center() - w.center()), radius_units(x)), radius_units(w));
    if (!r) throw DomainError("join of a classical point with itself is not a disk");
    return BerkPoint::disk(x.center(), *r);
}

// Shortest rational center of the same disk: keeps exact orbits from growing.
inline BerkPoint canonical(const Place& y, const BerkPoint& x) {
    if (!x.is_disk()) return x;
    const Rational& a = *x.a;
    switch (y.kind) {
        case PlaceKind::Trivial:
        case PlaceKind::TAdic:
            if (x.logr >= 0) return BerkPoint::disk(0, x.logr);
            return x;
        case PlaceKind::Residue: {
            if (x.logr >= 0) return BerkPoint::disk(0, x.logr);
            // residue class of a modulo p
            BigInt n = num(a), d = den(a);
            BigInt pp = y.p;
            BigInt inv = 1, base = ((d % pp) + pp) % pp;
            for (unsigned long e = y.p - 2; e > 0; e >>= 1) {
                if (e & 1) inv = inv * base % pp;
                base = base * base % pp;
            }
            BigInt r = ((n % pp + pp) % pp) * inv % pp;
            return BerkPoint::disk(Rational(r), x.logr);
        }
        case PlaceKind::Padic: {
            if (a == 0) return x;
            // keep a modulo p^m with m = ceil(-logr/eps)
            Rational m = ceil_rat(-x.logr / y.eps);
            long long v = vp(a, y.p);
            long long mm = m.convert_to<long long>();
            if (mm <= v) return BerkPoint::disk(0, x.logr);
            long long k = mm - v;
            BigInt mod = ipow(BigInt(y.p), k);
            Rational u = a / rpow(Rational(y.p), v);
            BigInt n = num(u), d = den(u);
            // modular inverse of d modulo p^k via extended Euclid
            BigInt r0 = mod, r1 = ((d % mod) + mod) % mod, s0 = 0, s1 = 1;
            while (r1 != 0) {
                BigInt q = r0 / r1;
                BigInt t = r0 - q * r1; r0 = r1; r1 = t;
                t = s0 - q * s1; s0 = s1; s1 = t;
            }
            BigInt inv = ((s0 % mod) + mod) % mod;
            BigInt red = ((n % mod + mod) % mod) * inv % mod;
            return BerkPoint::disk(Rational(red) * rpow(Rational(y.p), v), x.logr);
        }
        default: return x;
    }
}

}  // namespace hybrid
