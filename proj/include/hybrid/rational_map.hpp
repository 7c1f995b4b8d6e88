#pragma once
// Homogeneous lifts (F0,F1) of degree-d endomorphisms of P^1.

#include "berkovich.hpp"
#include "metric_graph.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <functional>
#include <vector>

namespace hybrid {

using cplx = std::complex<double>;

// F_i(T0,T1) = T1^d f_i(T0/T1); the f_i have formal degree d.
struct HomogeneousLift {
    int d = 0;
    Poly f0, f1;
    bool complex_coeffs = false;
    CPoly c0, c1;  // always populated
    Rational res;  // exact resultant (rational coefficients only)
    cplx cres;     // floating resultant

    bool polynomial() const {
        return !complex_coeffs && f1.degree() == 0 && f0.degree() == d;
    }
};

namespace detail {
// Sylvester matrix of two formal degree-d polynomials, rows highest coefficient first.
template <class S, class P>
std::vector<std::vector<S>> sylvester(const P& f, const P& g, int d) {
    int n = 2 * d;
    std::vector<std::vector<S>> M(n, std::vector<S>(n, S(0)));
    for (int r = 0; r < d; ++r)
        for (int k = 0; k <= d; ++k) {
            M[r][r + k] = f.coeff(d - k);
            M[r + d][r + k] = g.coeff(d - k);
        }
    return M;
}

template <class S>
S determinant(std::vector<std::vector<S>> A) {
    int n = int(A.size());
    S det = S(1);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (A[r][col] == S(0)) continue;
            if constexpr (std::is_same_v<S, Rational>) { piv = r; break; }
            else if (piv < 0 || std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        }
        if (piv < 0) return S(0);
        if (piv != col) {
            std::swap(A[piv], A[col]);
            det = -det;
        }
        det *= A[col][col];
        for (int r = col + 1; r < n; ++r) {
            if (A[r][col] == S(0)) continue;
            S f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    return det;
}
}  // namespace detail

// Homogeneous (formal degree d) Sylvester resultant.
inline Rational resultant(const Poly& f, const Poly& g, int d) {
    return detail::determinant(detail::sylvester<Rational>(f, g, d));
}
inline cplx resultant(const CPoly& f, const CPoly& g, int d) {
    return detail::determinant(detail::sylvester<cplx>(f, g, d));
}

inline HomogeneousLift make_lift(int d, const Poly& f0, const Poly& f1) {
    if (d < 1) throw DomainError("map degree must be positive");
    if (f0.degree() > d || f1.degree() > d) throw DomainError("coefficient beyond the declared degree");
    HomogeneousLift F;
    F.d = d;
    F.f0 = f0;
    F.f1 = f1;
    F.c0 = to_complex(f0);
    F.c1 = to_complex(f1);
    F.res = resultant(f0, f1, d);
    F.cres = cplx(to_double(F.res), 0);
    if (F.res == 0) throw DomainError("resultant vanishes: F0 and F1 share a root");
    return F;
}

inline HomogeneousLift make_lift(int d, const CPoly& c0, const CPoly& c1) {
    if (c0.degree() > d || c1.degree() > d) throw DomainError("coefficient beyond the declared degree");
    HomogeneousLift F;
    F.d = d;
    F.complex_coeffs = true;
    F.c0 = c0;
    F.c1 = c1;
    F.cres = resultant(c0, c1, d);
    double scale = 1;
    for (auto& v : c0.c) scale = std::max(scale, std::abs(v));
    for (auto& v : c1.c) scale = std::max(scale, std::abs(v));
    if (std::abs(F.cres) <= 1e-12 * std::pow(scale, 2 * d))
        throw DomainError("resultant vanishes numerically");
    return F;
}

// Polynomial map T -> f0(T)/c with c = f1.
inline HomogeneousLift polynomial_map(const Poly& f, const Rational& c = 1) {
    return make_lift(f.degree(), f, Poly({c}));
}

inline void require_rational(const HomogeneousLift& F) {
    if (F.complex_coeffs) throw DomainError("complex coefficients only make sense at archimedean places");
}

// (F0, F1) at a homogeneous complex vector.
inline std::pair<cplx, cplx> apply_lift(const HomogeneousLift& F, cplx w0, cplx w1) {
    cplx a = 0, b = 0, p1 = 1;
    std::vector<cplx> pw(F.d + 1);
    for (int k = 0; k <= F.d; ++k) {
        pw[k] = p1;
        p1 *= w0;
    }
    cplx q = 1;
    for (int k = F.d; k >= 0; --k) {
        a += F.c0.coeff(k) * pw[k] * q;
        b += F.c1.coeff(k) * pw[k] * q;
        q *= w1;
    }
    return {a, b};
}

// Normalized lift of a point: max(|w0|,|w1|) = 1.
inline std::pair<cplx, cplx> lift_of(const BerkPoint& x) {
    if (x.is_inf()) return {1, 0};
    if (x.is_disk()) throw DomainError("disk point has no complex lift");
    cplx z = x.z;
    if (std::abs(z) <= 1) return {z, 1};
    return {1, 1.0 / z};
}

inline BerkPoint point_of(cplx w0, cplx w1) {
    if (w1 == cplx(0)) return BerkPoint::infinity();
    return BerkPoint::classical(w0 / w1);
}

inline BerkPoint apply_point(const Place& y, const HomogeneousLift& F, const BerkPoint& x) {
    check_fiber(y, x);
    if (y.archimedean()) {
        auto [w0, w1] = lift_of(x);
        auto [a, b] = apply_lift(F, w0, w1);
        return point_of(a, b);
    }
    require_rational(F);
    if (x.is_inf()) {
        Rational a = F.f0.coeff(F.d), b = F.f1.coeff(F.d);
        if (b == 0) return BerkPoint::infinity();
        return BerkPoint::classical(a / b);
    }
    if (x.is_classical()) {
        Rational b = F.f1(x.center());
        if (b == 0) return BerkPoint::infinity();
        return BerkPoint::classical(F.f0(x.center()) / b);
    }
    if (!F.polynomial())
        throw UnsupportedError("disk transport needs a polynomial map (F1 = c*T1^d)");
    Poly phi = (Rational(1) / F.f1.c[0]) * F.f0;
    Poly S = phi.taylor_shift(x.center());
    XRat r;
    for (int i = 1; i <= S.degree(); ++i)
        if (S.c[i] != 0) r = xmax(r, xadd(abs_log_units(y, S.c[i]), Rational(i) * x.logr));
    if (!r) throw NumericError("constant map in disk transport");
    return canonical(y, BerkPoint::disk(S.coeff(0), *r));
}

struct PreimageSet {
    std::vector<std::pair<BerkPoint, int>> points;
    bool ill_conditioned = false;

    int total() const {
        int t = 0;
        for (auto& p : points) t += p.second;
        return t;
    }
};

// Roots of a complex polynomial with multiplicity, by companion eigenvalues.
inline std::vector<std::pair<cplx, int>> polynomial_roots(const CPoly& P, bool* ill = nullptr) {
    int n = P.degree();
    if (n < 0) throw NumericError("roots of the zero polynomial");
    std::vector<cplx> raw;
    if (n == 1) raw.push_back(-P.c[0] / P.c[1]);
    else if (n >= 2) {
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 1; i < n; ++i) C(i, i - 1) = 1;
        for (int i = 0; i < n; ++i) C(i, n - 1) = -P.c[i] / P.c[n];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
        if (es.info() != Eigen::Success) throw NumericError("eigenvalue solver failed");
        for (int i = 0; i < n; ++i) raw.push_back(es.eigenvalues()[i]);
        CPoly dP = P.derivative();
        for (auto& z : raw) {
            cplx v = P(z), dv = dP(z);
            if (std::abs(dv) > 1e-8 * (1 + std::abs(v))) {
                cplx z2 = z - v / dv;
                if (std::abs(P(z2)) < std::abs(v)) z = z2;
            }
        }
    }
    std::sort(raw.begin(), raw.end(), [](cplx a, cplx b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    // single-linkage clustering
    std::vector<int> comp(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) comp[i] = int(i);
    std::function<int(int)> find = [&](int i) { return comp[i] == i ? i : comp[i] = find(comp[i]); };
    bool close_call = false;
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t j = i + 1; j < raw.size(); ++j) {
            double dist = std::abs(raw[i] - raw[j]);
            double scale = 1 + std::abs(raw[i]);
            if (dist <= 1e-7 * scale) comp[find(int(i))] = find(int(j));
            else if (dist <= 1e-5 * scale) close_call = true;
        }
    std::map<int, std::pair<cplx, int>> acc;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& a = acc[find(int(i))];
        a.first += raw[i];
        a.second += 1;
    }
    std::vector<std::pair<cplx, int>> out;
    for (auto& [k, v] : acc) out.push_back({v.first / double(v.second), v.second});
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) {
        return a.first.real() < b.first.real() || (a.first.real() == b.first.real() && a.first.imag() < b.first.imag());
    });
    if (ill) *ill = close_call;
    return out;
}

inline PreimageSet preimages_arch(const HomogeneousLift& F, const BerkPoint& target) {
    if (target.is_disk()) throw DomainError("preimages of disk points are not implemented");
    CPoly H;
    if (target.is_inf()) H = F.c1;
    else H = F.c0 - CPoly({target.z}) * F.c1;
    PreimageSet S;
    if (H.zero()) throw NumericError("degenerate preimage equation");
    auto roots = polynomial_roots(H, &S.ill_conditioned);
    for (auto& [z, m] : roots) S.points.push_back({BerkPoint::classical(z), m});
    int at_inf = F.d - H.degree();
    if (at_inf > 0) S.points.push_back({BerkPoint::infinity(), at_inf});
    return S;
}

// (phi_* f)(x') = sum over preimages with multiplicity.
inline double pushforward_values(const HomogeneousLift& F, const std::function<double(const BerkPoint&)>& f,
                                 const BerkPoint& target) {
    KahanSum s;
    for (auto& [x, m] : preimages_arch(F, target).points) s.add(m * f(x));
    return s.value();
}

}  // namespace hybrid
