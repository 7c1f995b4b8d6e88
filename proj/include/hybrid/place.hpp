#pragma once
// Places of the base spectra and log-scale absolute values.

#include "core.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace hybrid {

enum class PlaceKind { Arch, Padic, TAdic, Trivial, Residue };

// A point of the base: |.|_inf^eps, |.|_p^eps, t-adic (trivial on Q), |.|_0, or |.|_p^{+inf}.
// Ultrametric log-magnitudes are exact rationals in units of log p (p-adic) or 1 (otherwise).
struct Place {
    PlaceKind kind = PlaceKind::Trivial;
    Rational eps = 1;
    unsigned long p = 0;
    std::string tag;  // coefficient-field tag for t-adic places

    static Place arch(const Rational& e) {
        if (e <= 0 || e > 1) throw DomainError("archimedean exponent must lie in (0,1]");
        return Place{PlaceKind::Arch, e, 0, {}};
    }
    static Place padic(unsigned long p, const Rational& e = 1) {
        if (!is_prime(p)) throw DomainError("p-adic place needs a prime, got " + std::to_string(p));
        if (e <= 0) throw DomainError("p-adic exponent must be positive");
        return Place{PlaceKind::Padic, e, p, {}};
    }
    static Place tadic(const Rational& e = 1, std::string field = "Q") {
        if (e <= 0) throw DomainError("t-adic exponent must be positive");
        return Place{PlaceKind::TAdic, e, 0, std::move(field)};
    }
    static Place trivial() { return Place{PlaceKind::Trivial, 0, 0, {}}; }
    static Place residue(unsigned long p) {
        if (!is_prime(p)) throw DomainError("residue place needs a prime, got " + std::to_string(p));
        return Place{PlaceKind::Residue, 0, p, {}};
    }

    bool archimedean() const { return kind == PlaceKind::Arch; }
    bool ultrametric() const { return !archimedean(); }
    // Natural log of one ultrametric unit.
    double unit() const { return kind == PlaceKind::Padic ? std::log(double(p)) : 1.0; }

    bool operator==(const Place& o) const {
        return kind == o.kind && eps == o.eps && p == o.p && tag == o.tag;
    }
};

inline std::string kind_name(const Place& y) {
    switch (y.kind) {
        case PlaceKind::Arch: return "arch";
        case PlaceKind::Padic: return "padic";
        case PlaceKind::TAdic: return "tadic";
        case PlaceKind::Trivial: return "trivial";
        case PlaceKind::Residue: return "res";
    }
    return "?";
}

inline std::string param_string(const Place& y) {
    switch (y.kind) {
        case PlaceKind::Arch:
        case PlaceKind::TAdic: return "eps=" + to_string(y.eps);
        case PlaceKind::Padic: return "p=" + std::to_string(y.p) + ";eps=" + to_string(y.eps);
        case PlaceKind::Residue: return "p=" + std::to_string(y.p);
        case PlaceKind::Trivial: return "-";
    }
    return "";
}

inline std::string describe(const Place& y) { return kind_name(y) + "(" + param_string(y) + ")"; }

// Extended rational: nullopt is -infinity.
using XRat = std::optional<Rational>;

inline XRat xadd(const XRat& a, const XRat& b) {
    if (!a || !b) return std::nullopt;
    return *a + *b;
}
inline XRat xmax(const XRat& a, const XRat& b) {
    if (!a) return b;
    if (!b) return a;
    return *a < *b ? b : a;
}
inline XRat xscale(const Rational& q, const XRat& a) {
    if (!a) {
        if (q == 0) return Rational(0);
        return std::nullopt;
    }
    return q * *a;
}

struct LogMag {
    enum class Inf : signed char { None, Neg, Pos };
    Inf inf = Inf::None;
    bool exact = false;
    Rational units;  // exact value in place units
    double unit = 1;
    double real = 0;  // float value when !exact

    static LogMag neg_inf() { LogMag m; m.inf = Inf::Neg; m.exact = true; return m; }
    static LogMag pos_inf() { LogMag m; m.inf = Inf::Pos; m.exact = true; return m; }
    static LogMag of_units(const XRat& u, double unit) {
        if (!u) return neg_inf();
        LogMag m;
        m.exact = true;
        m.units = *u;
        m.unit = unit;
        return m;
    }
    static LogMag of_real(double x) {
        if (x == kNegInf) return neg_inf();
        if (x == kPosInf) return pos_inf();
        LogMag m;
        m.real = x;
        return m;
    }

    bool is_neg_inf() const { return inf == Inf::Neg; }
    bool is_pos_inf() const { return inf == Inf::Pos; }
    bool finite() const { return inf == Inf::None; }
    double value() const {
        if (inf == Inf::Neg) return kNegInf;
        if (inf == Inf::Pos) return kPosInf;
        return exact ? to_double(units) * unit : real;
    }
    XRat xunits() const {
        if (!exact) throw DomainError("LogMag is not exact");
        if (inf == Inf::Pos) throw DomainError("LogMag is +infinity");
        if (inf == Inf::Neg) return std::nullopt;
        return units;
    }
};

// log|q| at the place, exact in place units for ultrametric kinds.
inline XRat abs_log_units(const Place& y, const Rational& q) {
    if (y.archimedean()) throw DomainError("abs_log_units needs an ultrametric place");
    if (q == 0) return std::nullopt;
    switch (y.kind) {
        case PlaceKind::Padic: return -y.eps * Rational(vp(q, y.p));
        case PlaceKind::TAdic:
        case PlaceKind::Trivial: return Rational(0);
        case PlaceKind::Residue:
            if (den(q) % y.p == 0)
                throw DomainError("|" + to_string(q) + "| is unbounded at " + describe(y));
            if (num(q) % y.p == 0) return std::nullopt;
            return Rational(0);
        default: break;
    }
    return Rational(0);
}

inline LogMag abs_log(const Place& y, const Rational& q) {
    if (y.archimedean()) {
        if (q == 0) return LogMag::neg_inf();
        // log of a big rational without overflow: via string-free bit lengths
        BigInt n = num(q), d = den(q);
        if (n < 0) n = -n;
        auto lg = [](const BigInt& v) {
            std::size_t bits = boost::multiprecision::msb(v);
            if (bits < 1000) return std::log(v.convert_to<double>());
            BigInt shifted = v >> (bits - 60);
            return std::log(shifted.convert_to<double>()) + double(bits - 60) * std::log(2.0);
        };
        return LogMag::of_real(to_double(y.eps) * (lg(n) - lg(d)));
    }
    return LogMag::of_units(abs_log_units(y, q), y.unit());
}

inline double abs_log_complex(const Place& y, std::complex<double> z) {
    if (!y.archimedean()) throw DomainError("complex scalar at an ultrametric place");
    double a = std::abs(z);
    if (a == 0) return kNegInf;
    return to_double(y.eps) * std::log(a);
}

inline Rational epsilon_of(const Place& y) {
    if (!y.archimedean()) throw DomainError("epsilon_of needs an archimedean place, got " + describe(y));
    return y.eps;
}

inline Place flow_place(const Place& y, const Rational& e) {
    if (e <= 0 || e > 1) throw DomainError("flow exponent must lie in (0,1]");
    Place r = y;
    switch (y.kind) {
        case PlaceKind::Arch:
        case PlaceKind::Padic:
        case PlaceKind::TAdic: r.eps = y.eps * e; break;
        default: break;
    }
    return r;
}

}  // namespace hybrid
