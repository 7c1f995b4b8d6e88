#pragma once
// Standard metric, one-step deviation g, escape-rate potentials lambda_n and their limit.

#include "rational_map.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace hybrid {

// max(-log|T|, 0): minus log of the standard norm of the section T0.
inline double standard_potential(const Place& y, const BerkPoint& x) {
    if (x.is_inf()) return 0;
    double v = eval_log_abs(y, x, Poly({Rational(0), Rational(1)})).value();
    return std::max(-v, 0.0);
}

// g(z) = log||F(z)|| - d log||z|| with the max norm; exact units at ultrametric places.
inline LogMag deviation_g(const Place& y, const HomogeneousLift& F, const BerkPoint& x) {
    check_fiber(y, x);
    if (y.archimedean()) {
        auto [w0, w1] = lift_of(x);
        auto [a, b] = apply_lift(F, w0, w1);
        double n = std::max(std::abs(a), std::abs(b));
        if (n == 0) throw NumericError("lift vanishes: resultant must be zero");
        return LogMag::of_real(to_double(y.eps) * std::log(n));
    }
    require_rational(F);
    XRat g;
    if (x.is_inf()) {
        g = xmax(abs_log_units(y, F.f0.coeff(F.d)), abs_log_units(y, F.f1.coeff(F.d)));
    } else {
        XRat top = xmax(eval_units(y, x, F.f0), eval_units(y, x, F.f1));
        XRat norm = xmax(log_abs_T_units(y, x), Rational(0));
        g = xadd(top, xscale(Rational(-F.d), norm));
    }
    if (!g) throw NumericError("lift vanishes: resultant must be zero");
    return LogMag::of_units(g, y.unit());
}

struct GmaxCert {
    enum class Kind { Exact, Resultant, Heuristic };
    Kind kind = Kind::Resultant;
    double lower = 0, upper = 0;  // certified range of g
    double value = 0;             // bound on |g|
    bool exact = false;           // ultrametric: value = units * unit exactly
    Rational units;
};

inline std::string to_string(GmaxCert::Kind k) {
    switch (k) {
        case GmaxCert::Kind::Exact: return "exact";
        case GmaxCert::Kind::Resultant: return "resultant";
        case GmaxCert::Kind::Heuristic: return "heuristic";
    }
    return "?";
}

namespace detail {
// G1 f0 + G2 f1 = T^k (k = 0 or 2d-1), G_i of formal degree d-1.
inline std::pair<Poly, Poly> bezout_pair(const HomogeneousLift& F, int k) {
    int d = F.d, n = 2 * d;
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n, Rational(0)));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= d; ++j) {
            A[i + j][i] += F.f0.coeff(j);
            A[i + j][d + i] += F.f1.coeff(j);
        }
    std::vector<Rational> rhs(n, Rational(0));
    rhs[k] = 1;
    auto x = solve_dense(A, rhs);
    return {Poly(std::vector<Rational>(x.begin(), x.begin() + d)), Poly(std::vector<Rational>(x.begin() + d, x.end()))};
}

inline std::pair<CPoly, CPoly> bezout_pair_complex(const HomogeneousLift& F, int k) {
    int d = F.d, n = 2 * d;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j <= d; ++j) {
            A(i + j, i) += F.c0.coeff(j);
            A(i + j, d + i) += F.c1.coeff(j);
        }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(k) = 1;
    Eigen::VectorXcd x = A.fullPivLu().solve(rhs);
    std::vector<cplx> a(x.data(), x.data() + d), b(x.data() + d, x.data() + n);
    return {CPoly(a), CPoly(b)};
}

inline double l1(const CPoly& p) {
    double s = 0;
    for (auto& c : p.c) s += std::abs(c);
    return s;
}
}  // namespace detail

// Certified two-sided bound on g from coefficient sizes and a Bezout identity.
inline GmaxCert gmax_certified(const Place& y, const HomogeneousLift& F) {
    GmaxCert G;
    if (y.archimedean()) {
        double lo_c = 0;
        for (int k : {0, 2 * F.d - 1}) {
            double c;
            if (F.complex_coeffs) {
                auto [g1, g2] = detail::bezout_pair_complex(F, k);
                c = detail::l1(g1) + detail::l1(g2);
            } else {
                auto [g1, g2] = detail::bezout_pair(F, k);
                c = detail::l1(to_complex(g1)) + detail::l1(to_complex(g2));
            }
            lo_c = std::max(lo_c, c);
        }
        double e = to_double(y.eps);
        G.lower = -e * std::log(lo_c);
        G.upper = e * std::log(std::max(detail::l1(F.c0), detail::l1(F.c1)));
        G.value = std::max(std::fabs(G.lower), std::fabs(G.upper));
        G.kind = GmaxCert::Kind::Resultant;
        return G;
    }
    require_rational(F);
    XRat up, lo;
    for (auto& c : F.f0.c) up = xmax(up, abs_log_units(y, c));
    for (auto& c : F.f1.c) up = xmax(up, abs_log_units(y, c));
    for (int k : {0, 2 * F.d - 1}) {
        auto [g1, g2] = detail::bezout_pair(F, k);
        for (auto& c : g1.c) lo = xmax(lo, abs_log_units(y, c));
        for (auto& c : g2.c) lo = xmax(lo, abs_log_units(y, c));
    }
    Rational upper = *up, lower = -*lo;
    G.units = std::max(upper < 0 ? -upper : upper, lower < 0 ? -lower : lower);
    G.exact = true;
    G.kind = GmaxCert::Kind::Exact;
    G.lower = to_double(lower) * y.unit();
    G.upper = to_double(upper) * y.unit();
    G.value = to_double(G.units) * y.unit();
    return G;
}

// Sampled fallback: 2048 sphere points, doubled for safety. Not a proof.
inline GmaxCert gmax_heuristic(const Place& y, const HomogeneousLift& F, unsigned long long seed = 1) {
    if (!y.archimedean()) throw DomainError("sampled bound is archimedean only");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    double lo = kPosInf, hi = kNegInf;
    for (int i = 0; i < 2048; ++i) {
        // uniform on the Riemann sphere via the stereographic projection
        double u = 2 * U(rng) - 1, th = 2 * M_PI * U(rng);
        double s = std::sqrt(std::max(0.0, 1 - u * u));
        cplx w0(s * std::cos(th), s * std::sin(th)), w1(1 + u, 0);
        double n = std::max(std::abs(w0), std::abs(w1));
        auto [a, b] = apply_lift(F, w0 / n, w1 / n);
        double g = to_double(y.eps) * std::log(std::max(std::abs(a), std::abs(b)));
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    GmaxCert G;
    G.kind = GmaxCert::Kind::Heuristic;
    G.lower = std::min(0.0, 2 * lo);
    G.upper = std::max(0.0, 2 * hi);
    G.value = std::max(-G.lower, G.upper);
    return G;
}

// A potential value with its certificate.
struct Potential {
    double value = 0;
    bool exact = false;   // value = units * unit with no truncation
    Rational units;       // ultrametric partial sum (always exact arithmetic)
    int n_used = 0;
    double cert_err = 0;
    std::string method;   // good-reduction, cycle, invariant-disk, escape, truncated
};

// Sequence lambda_0..lambda_n at an archimedean point (Kahan-summed).
inline std::vector<double> lambda_sequence_arch(const Place& y, const HomogeneousLift& F, const BerkPoint& x, int n) {
    auto [w0, w1] = lift_of(x);
    double e = to_double(y.eps);
    std::vector<double> out{0.0};
    KahanSum s;
    double scale = 1.0 / F.d;
    for (int k = 0; k < n; ++k) {
        auto [a, b] = apply_lift(F, w0, w1);
        double nr = std::max(std::abs(a), std::abs(b));
        if (nr == 0) throw NumericError("lift vanishes along the orbit");
        s.add(-scale * std::log(nr));
        scale /= F.d;
        w0 = a / nr;
        w1 = b / nr;
        out.push_back(e * s.value());
    }
    return out;
}

// Exact partial sums sum_{k<n} d^{-(k+1)} g(phi^k x), in units, k = 0..n.
inline std::vector<Rational> escape_sums_exact(const Place& y, const HomogeneousLift& F, const BerkPoint& x, int n) {
    std::vector<Rational> out{Rational(0)};
    BerkPoint cur = canonical(y, x);
    Rational scale = Rational(1) / F.d, s = 0;
    for (int k = 0; k < n; ++k) {
        s += scale * *deviation_g(y, F, cur).xunits();
        out.push_back(s);
        scale /= F.d;
        if (k + 1 < n) cur = apply_point(y, F, cur);
    }
    return out;
}

inline Potential lambda_n(const Place& y, const HomogeneousLift& F, const BerkPoint& x, int n) {
    if (n < 0) throw DomainError("iteration count must be nonnegative");
    Potential P;
    P.n_used = n;
    if (y.archimedean()) {
        P.value = lambda_sequence_arch(y, F, x, n).back();
        return P;
    }
    P.units = -escape_sums_exact(y, F, x, n).back();
    P.exact = true;
    P.value = to_double(P.units) * y.unit();
    return P;
}

namespace detail {
// Constant value of g on the whole forward orbit of x, when it can be proved (polynomial maps).
inline XRat constant_tail(const Place& y, const HomogeneousLift& F, const BerkPoint& x) {
    if (!F.polynomial() || x.is_inf()) return std::nullopt;
    const Rational& c = F.f1.c[0];
    Rational ac = *abs_log_units(y, c);
    XRat L = log_abs_T_units(y, x);
    // escape region: leading term strictly dominant and |T| nondecreasing
    if (L && *L >= 0) {
        Rational lead = *abs_log_units(y, F.f0.lead()) + Rational(F.d) * *L;
        bool dominant = true;
        for (int i = 0; i < F.d; ++i) {
            XRat t = xadd(abs_log_units(y, F.f0.coeff(i)), Rational(i) * *L);
            if (t && *t >= lead) dominant = false;
        }
        if (dominant && lead - ac >= *L) return *abs_log_units(y, F.f0.lead());
    }
    // forward-invariant disk on which g = log|c|
    std::vector<BerkPoint> cands;
    if (x.is_disk()) cands.push_back(x);
    if (L) cands.push_back(BerkPoint::disk(0, *L));
    for (auto& D : cands) {
        XRat LD = log_abs_T_units(y, D);
        if (!LD || *LD > 0) continue;
        XRat top = eval_units(y, D, F.f0);
        if (top && *top > ac) continue;
        if (!in_disk(y, apply_point(y, F, D), D)) continue;
        return ac;
    }
    return std::nullopt;
}
}  // namespace detail

// lambda_phi with a certified error; exact closed forms in ultrametric fibers when detectable.
inline Potential lambda_limit(const Place& y, const HomogeneousLift& F, const BerkPoint& x, double tol,
                              const GmaxCert* cert = nullptr, int max_iter = 200) {
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    GmaxCert G = cert ? *cert : gmax_certified(y, F);
    const double d = F.d;
    Potential P;
    if (y.archimedean()) {
        int n = 0;
        while (G.value / (std::pow(d, n) * (d - 1)) > tol) ++n;
        P = lambda_n(y, F, x, n);
        P.cert_err = G.value / (std::pow(d, n) * (d - 1));
        P.method = G.kind == GmaxCert::Kind::Heuristic ? "truncated-heuristic" : "truncated";
        return P;
    }
    check_fiber(y, x);
    auto finish = [&](const Rational& sum, int n, const char* how) {
        P.units = -sum;
        P.value = to_double(P.units) * y.unit();
        P.exact = true;
        P.n_used = n;
        P.cert_err = 0;
        P.method = how;
        return P;
    };
    if (G.exact && G.units == 0) return finish(0, 0, "good-reduction");
    std::vector<BerkPoint> orbit;
    std::vector<Rational> partial{Rational(0)};  // partial[m] = sum_{k<m}
    std::vector<Rational> gs;
    BerkPoint cur = canonical(y, x);
    Rational dpow = 1;  // d^m
    for (int m = 0; m <= max_iter; ++m) {
        for (int j = 0; j < m; ++j)
            if (same_point(y, orbit[j], cur)) {
                int per = m - j;
                Rational block = partial[m] - partial[j];
                Rational q = Rational(1) - Rational(1) / rpow(Rational(F.d), per);
                return finish(partial[j] + block / q, m, "cycle");
            }
        if (XRat tail = detail::constant_tail(y, F, cur))
            return finish(partial[m] + *tail / (dpow * Rational(F.d - 1)), m, "escape-or-invariant");
        double err = G.value / (to_double(dpow) * (d - 1));
        if (err <= tol || m == max_iter) {
            P.units = -partial[m];
            P.value = to_double(P.units) * y.unit();
            P.exact = false;
            P.n_used = m;
            P.cert_err = err;
            P.method = "truncated";
            return P;
        }
        Rational g = *deviation_g(y, F, cur).xunits();
        gs.push_back(g);
        orbit.push_back(cur);
        dpow *= F.d;
        partial.push_back(partial[m] + g / dpow);
        cur = apply_point(y, F, cur);
    }
    throw NumericError("lambda_limit did not terminate");
}

inline double ecart_dK(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.empty() || u.size() != v.size()) throw DomainError("ecart needs two samples of equal nonzero size");
    double m = 0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::fabs(u[i] - v[i]));
    return m;
}

struct ContractionRow {
    int n = 0;
    double dk_next = 0, dk_prev = 0;  // d_K(l_{n+1}, l_n), d_K(l_n, l_{n-1})
    double ratio = 0;
    bool exact_zero = false;
    double image_ratio = 0;  // d_K(l_{n+1},l_n) / d_{phi(K)}(l_n,l_{n-1}); equals 1/d
};

struct ContractionReport {
    std::vector<ContractionRow> rows;
    GmaxCert gmax;
    int n_cert = 0;
    double cert_err = 0;  // G_max / (d^n (d-1)) at n_cert
};

// Successive ecart ratios of lambda_n over a finite sample K.
inline ContractionReport report_contraction(const Place& y, const HomogeneousLift& F, const std::vector<BerkPoint>& K,
                                            int N, int n_cert = 20) {
    if (N < 3) throw DomainError("contraction report needs N >= 3");
    if (K.empty()) throw DomainError("contraction report needs a nonempty sample");
    // lam[i][n] on K and on phi(K)
    std::vector<std::vector<double>> lam, lam_img;
    std::vector<std::vector<Rational>> ex, ex_img;
    for (auto& x : K) {
        BerkPoint fx = apply_point(y, F, x);
        if (y.archimedean()) {
            lam.push_back(lambda_sequence_arch(y, F, x, N + 1));
            lam_img.push_back(lambda_sequence_arch(y, F, fx, N + 1));
        } else {
            ex.push_back(escape_sums_exact(y, F, x, N + 1));
            ex_img.push_back(escape_sums_exact(y, F, fx, N + 1));
        }
    }
    ContractionReport R;
    R.gmax = gmax_certified(y, F);
    R.n_cert = n_cert;
    R.cert_err = R.gmax.value / (std::pow(double(F.d), n_cert) * (F.d - 1));
    for (int n = 1; n < N; ++n) {
        ContractionRow row;
        row.n = n;
        if (y.archimedean()) {
            double a = 0, b = 0, c = 0;
            for (std::size_t i = 0; i < K.size(); ++i) {
                a = std::max(a, std::fabs(lam[i][n + 1] - lam[i][n]));
                b = std::max(b, std::fabs(lam[i][n] - lam[i][n - 1]));
                c = std::max(c, std::fabs(lam_img[i][n] - lam_img[i][n - 1]));
            }
            row.dk_next = a;
            row.dk_prev = b;
            row.exact_zero = b == 0;
            row.ratio = b == 0 ? 0 : a / b;
            row.image_ratio = c == 0 ? 0 : a / c;
        } else {
            Rational a = 0, b = 0, c = 0;
            auto absr = [](const Rational& q) { return q < 0 ? Rational(-q) : q; };
            for (std::size_t i = 0; i < K.size(); ++i) {
                a = std::max(a, absr(ex[i][n + 1] - ex[i][n]));
                b = std::max(b, absr(ex[i][n] - ex[i][n - 1]));
                c = std::max(c, absr(ex_img[i][n] - ex_img[i][n - 1]));
            }
            row.dk_next = to_double(a) * y.unit();
            row.dk_prev = to_double(b) * y.unit();
            row.exact_zero = b == 0;
            row.ratio = b == 0 ? 0 : to_double(a / b);
            row.image_ratio = c == 0 ? 0 : to_double(a / c);
        }
        R.rows.push_back(row);
    }
    return R;
}

// n equally spaced points on |z - c| = r (Euclidean).
inline std::vector<BerkPoint> circle_sample(cplx c, double r, int n) {
    std::vector<BerkPoint> K;
    for (int k = 0; k < n; ++k) K.push_back(BerkPoint::classical(c + std::polar(r, 2 * M_PI * k / n)));
    return K;
}

}  // namespace hybrid
