#pragma once
// Dense univariate polynomials, coefficients stored low degree first.

#include "core.hpp"

#include <complex>
#include <vector>

namespace hybrid {

template <class S>
struct BasicPoly {
    std::vector<S> c;

    BasicPoly() = default;
    BasicPoly(std::initializer_list<S> l) : c(l) { trim(); }
    explicit BasicPoly(std::vector<S> v) : c(std::move(v)) { trim(); }

    static BasicPoly monomial(const S& a, int k) {
        std::vector<S> v(k + 1, S(0));
        v[k] = a;
        return BasicPoly(std::move(v));
    }

    void trim() {
        while (!c.empty() && c.back() == S(0)) c.pop_back();
    }
    bool zero() const { return c.empty(); }
    int degree() const { return int(c.size()) - 1; }  // -1 for the zero polynomial
    S coeff(int i) const { return (i >= 0 && i < int(c.size())) ? c[i] : S(0); }
    S lead() const { return c.empty() ? S(0) : c.back(); }

    template <class X>
    X operator()(const X& x) const {
        X r = X(0);
        for (int i = degree(); i >= 0; --i) r = r * x + X(c[i]);
        return r;
    }

    friend BasicPoly operator+(const BasicPoly& a, const BasicPoly& b) {
        std::vector<S> v(std::max(a.c.size(), b.c.size()), S(0));
        for (std::size_t i = 0; i < a.c.size(); ++i) v[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) v[i] += b.c[i];
        return BasicPoly(std::move(v));
    }
    friend BasicPoly operator-(const BasicPoly& a) {
        BasicPoly r = a;
        for (auto& x : r.c) x = -x;
        return r;
    }
    friend BasicPoly operator-(const BasicPoly& a, const BasicPoly& b) { return a + (-b); }
    friend BasicPoly operator*(const BasicPoly& a, const BasicPoly& b) {
        if (a.zero() || b.zero()) return {};
        std::vector<S> v(a.c.size() + b.c.size() - 1, S(0));
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) v[i + j] += a.c[i] * b.c[j];
        return BasicPoly(std::move(v));
    }
    friend BasicPoly operator*(const S& s, const BasicPoly& a) {
        BasicPoly r = a;
        for (auto& x : r.c) x *= s;
        r.trim();
        return r;
    }
    bool operator==(const BasicPoly& o) const { return c == o.c; }

    // Coefficients of P(a + T).
    BasicPoly taylor_shift(const S& a) const {
        std::vector<S> v = c;
        int n = int(v.size());
        for (int i = 0; i < n; ++i)
            for (int j = n - 2; j >= i; --j) v[j] += a * v[j + 1];
        return BasicPoly(std::move(v));
    }

    // T^k P(1/T); k defaults to the degree.
    BasicPoly reversed(int k = -2) const {
        if (k == -2) k = degree();
        if (k < degree()) throw DomainError("reversal degree below polynomial degree");
        std::vector<S> v(k + 1, S(0));
        for (int i = 0; i <= degree(); ++i) v[k - i] = c[i];
        return BasicPoly(std::move(v));
    }

    BasicPoly derivative() const {
        std::vector<S> v;
        for (int i = 1; i <= degree(); ++i) v.push_back(S(i) * c[i]);
        return BasicPoly(std::move(v));
    }

    BasicPoly pow(int e) const {
        BasicPoly r({S(1)});
        for (int i = 0; i < e; ++i) r = r * *this;
        return r;
    }
};

using Poly = BasicPoly<Rational>;
using CPoly = BasicPoly<std::complex<double>>;

inline CPoly to_complex(const Poly& p) {
    std::vector<std::complex<double>> v;
    for (auto& q : p.c) v.emplace_back(to_double(q), 0.0);
    return CPoly(std::move(v));
}

// Polynomial T - a.
inline Poly linear(const Rational& a) { return Poly({-a, Rational(1)}); }

inline std::string to_string(const Poly& p) {
    if (p.zero()) return "0";
    std::string s;
    for (int i = p.degree(); i >= 0; --i) {
        if (p.c[i] == 0) continue;
        if (!s.empty()) s += " + ";
        s += "(" + to_string(p.c[i]) + ")";
        if (i >= 1) s += "T";
        if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
}

}  // namespace hybrid
