#pragma once
// Atoms plus circle-Haar components; integration, push/pull, equilibrium measures.

#include "green.hpp"
#include "skeleton.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hybrid {

using PointFn = std::function<double(const BerkPoint&)>;

struct HaarComponent {
    cplx center;
    double radius = 1;  // Euclidean radius
    double weight = 1;
};

struct Measure {
    std::vector<std::pair<BerkPoint, double>> atoms;
    std::vector<HaarComponent> haar;

    double total_mass() const {
        KahanSum s;
        for (auto& a : atoms) s.add(a.second);
        for (auto& h : haar) s.add(h.weight);
        return s.value();
    }
    static Measure dirac(const BerkPoint& x, double w = 1) {
        Measure m;
        m.atoms.push_back({x, w});
        return m;
    }
    static Measure haar_circle(cplx c, double r, double w = 1) {
        Measure m;
        m.haar.push_back({c, r, w});
        return m;
    }
};

// chi_{c,rho}: Haar measure on the circle of fiber radius e^{logr} (archimedean),
// Dirac mass at eta_{c, logr} (ultrametric, logr in place units).
inline Measure chi(const Place& y, const Rational& c, const Rational& logr) {
    if (y.archimedean())
        return Measure::haar_circle({to_double(c), 0.0}, std::exp(to_double(logr) / to_double(y.eps)));
    return Measure::dirac(canonical(y, BerkPoint::disk(c, logr)));
}

struct Integral {
    double value = 0;
    double err = 0;  // quadrature change at the last doubling
    int quad_used = 0;
};

inline double circle_average(const PointFn& f, const HaarComponent& h, int n) {
    KahanSum s;
    for (int k = 0; k < n; ++k) {
        double th = 2 * M_PI * (k + 0.5) / n;
        s.add(f(BerkPoint::classical(h.center + std::polar(h.radius, th))));
    }
    return s.value() / n;
}

// Atom sum plus trapezoid rules on circles, doubling until two passes agree to 1e-9.
inline Integral integrate(const Place& y, const Measure& mu, const PointFn& f, int quad_n = 256,
                          int quad_cap = 1 << 16) {
    Integral I;
    KahanSum s;
    for (auto& [x, w] : mu.atoms) {
        if (w == 0) continue;
        double v = f(x);
        if (!std::isfinite(v)) throw NumericError("integrand is infinite at atom " + to_string(x));
        s.add(w * v);
    }
    if (!mu.haar.empty() && !y.archimedean()) throw DomainError("circle components only exist in archimedean fibers");
    for (auto& h : mu.haar) {
        int n = std::max(4, quad_n);
        double prev = circle_average(f, h, n);
        double err = kPosInf;
        while (n < quad_cap) {
            n *= 2;
            double next = circle_average(f, h, n);
            err = std::fabs(next - prev);
            prev = next;
            if (err < 1e-9) break;
        }
        if (!std::isfinite(prev)) throw NumericError("integrand is infinite on a circle");
        s.add(h.weight * prev);
        I.err += std::fabs(h.weight) * err;
        I.quad_used = std::max(I.quad_used, n);
    }
    I.value = s.value();
    return I;
}

// Transports atoms; circles go through circle_rule when given, otherwise they are sampled.
inline Measure pushforward_measure(const std::function<BerkPoint(const BerkPoint&)>& map, const Measure& mu,
                                   const std::function<std::optional<HaarComponent>(const HaarComponent&)>& circle_rule = {},
                                   int samples = 1024) {
    Measure out;
    for (auto& [x, w] : mu.atoms) out.atoms.push_back({map(x), w});
    for (auto& h : mu.haar) {
        if (circle_rule)
            if (auto img = circle_rule(h)) {
                out.haar.push_back(*img);
                continue;
            }
        for (int k = 0; k < samples; ++k) {
            double th = 2 * M_PI * (k + 0.5) / samples;
            out.atoms.push_back({map(BerkPoint::classical(h.center + std::polar(h.radius, th))), h.weight / samples});
        }
    }
    return out;
}

// phi^* of an atomic measure: each atom spreads over its preimages with multiplicity.
inline Measure pullback_measure(const Place& y, const HomogeneousLift& F, const Measure& mu, bool* ill = nullptr) {
    if (!y.archimedean()) throw DomainError("pullback is implemented over archimedean fibers");
    if (!mu.haar.empty()) throw DomainError("pullback needs a purely atomic measure");
    Measure out;
    for (auto& [x, w] : mu.atoms) {
        auto P = preimages_arch(F, x);
        if (ill && P.ill_conditioned) *ill = true;
        for (auto& [z, m] : P.points) out.atoms.push_back({z, w * m});
    }
    return out;
}

namespace detail {
inline bool before(const BerkPoint& a, const BerkPoint& b) {
    if (a.is_inf() != b.is_inf()) return b.is_inf();
    if (a.is_inf()) return false;
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
}

// Sort by (re, im) and merge adjacent near-duplicates.
inline void merge_atoms(Measure& m) {
    std::sort(m.atoms.begin(), m.atoms.end(), [](auto& a, auto& b) { return before(a.first, b.first); });
    std::vector<std::pair<BerkPoint, double>> out;
    for (auto& a : m.atoms) {
        if (!out.empty()) {
            auto& last = out.back().first;
            bool same = (last.is_inf() && a.first.is_inf()) ||
                        (!last.is_inf() && !a.first.is_inf() &&
                         std::abs(last.z - a.first.z) <= 1e-9 * (1 + std::abs(a.first.z)));
            if (same) {
                out.back().second += a.second;
                continue;
            }
        }
        out.push_back(a);
    }
    m.atoms = std::move(out);
}
}  // namespace detail

struct ArchEquilibrium {
    Measure mu;
    Measure prev;  // the level n-1 measure (equal to mu when n = 0)
    int n = 0;
    bool exceptional_warning = false;
    bool ill_conditioned = false;
};

// d^{-n} (phi^*)^n delta_seed.
inline ArchEquilibrium equilibrium_arch(const Place& y, const HomogeneousLift& F, const BerkPoint& seed, int n) {
    if (!y.archimedean()) throw DomainError("equilibrium_arch needs an archimedean place");
    if (n < 0) throw DomainError("depth must be nonnegative");
    ArchEquilibrium E;
    E.n = n;
    Measure cur = Measure::dirac(seed);
    std::vector<std::size_t> distinct{1};
    for (int k = 0; k < n; ++k) {
        Measure next = pullback_measure(y, F, cur, &E.ill_conditioned);
        for (auto& a : next.atoms) a.second /= F.d;
        detail::merge_atoms(next);
        distinct.push_back(next.atoms.size());
        E.prev = std::move(cur);
        cur = std::move(next);
    }
    for (std::size_t k = 0; k + 2 < distinct.size(); ++k)
        if (distinct[k] <= 2 && distinct[k + 1] <= 2 && distinct[k + 2] <= 2) E.exceptional_warning = true;
    if (n == 0) E.prev = cur;
    E.mu = std::move(cur);
    return E;
}

struct NonarchEquilibrium {
    PLFunction<Rational> lambda;     // units; exact when every vertex value is
    GraphMeasure<Rational> weights;  // delta_Gauss - Laplacian(lambda)
    Measure mu;
    bool exact = true;
    Rational total;
    Rational min_weight;
    double lambda_err = 0;  // max certified error over vertices
    std::vector<Potential> potentials;
};

inline NonarchEquilibrium equilibrium_nonarch(const Place& y, const HomogeneousLift& F, const MetricGraph& skel,
                                              double tol = 1e-12) {
    if (y.archimedean()) throw DomainError("equilibrium_nonarch needs an ultrametric place");
    int gauss = find_vertex(y, skel, BerkPoint::gauss());
    if (gauss < 0) throw DomainError("skeleton must contain the Gauss point");
    GmaxCert G = gmax_certified(y, F);
    NonarchEquilibrium E;
    E.lambda.graph = skel;
    std::string failed;
    for (int v = 0; v < skel.size(); ++v) {
        try {
            Potential P = lambda_limit(y, F, *skel.labels[v], tol, &G);
            E.exact = E.exact && P.exact;
            E.lambda_err = std::max(E.lambda_err, P.cert_err);
            E.lambda.values.push_back(P.units);
            E.potentials.push_back(P);
        } catch (const UnsupportedError&) {
            failed += (failed.empty() ? "" : ", ") + to_string(*skel.labels[v]);
            E.lambda.values.push_back(0);
        }
    }
    if (!failed.empty()) throw UnsupportedError("potential transport unsupported at vertices: " + failed);
    auto L = graph_laplacian(E.lambda);
    std::vector<Rational> w(skel.size(), Rational(0));
    w[gauss] += 1;
    for (auto& [v, m] : L.atoms) w[v] -= m;
    for (int v = 0; v < skel.size(); ++v) {
        E.weights.atoms.push_back({v, w[v]});
        E.mu.atoms.push_back({*skel.labels[v], to_double(w[v])});
    }
    E.total = E.weights.total();
    E.min_weight = *E.weights.min_weight();
    return E;
}

struct PairingParams {
    BerkPoint seed = BerkPoint::classical(Rational(2));
    int n = 10;
    double tol = 1e-10;
    std::optional<MetricGraph> skeleton;  // ultrametric fibers
};

// <mu_F, mu_G> = integral of (lambda_F - lambda_G) d(mu_F - mu_G); nonnegative.
inline double energy_pairing(const Place& y, const HomogeneousLift& F, const HomogeneousLift& G,
                             const PairingParams& prm = {}) {
    Measure mF, mG;
    if (y.archimedean()) {
        mF = equilibrium_arch(y, F, prm.seed, prm.n).mu;
        mG = equilibrium_arch(y, G, prm.seed, prm.n).mu;
    } else {
        if (!prm.skeleton) throw DomainError("ultrametric pairing needs a skeleton");
        mF = equilibrium_nonarch(y, F, *prm.skeleton, prm.tol).mu;
        mG = equilibrium_nonarch(y, G, *prm.skeleton, prm.tol).mu;
    }
    GmaxCert cF = gmax_certified(y, F), cG = gmax_certified(y, G);
    auto diff = [&](const BerkPoint& x) {
        return lambda_limit(y, F, x, prm.tol, &cF).value - lambda_limit(y, G, x, prm.tol, &cG).value;
    };
    KahanSum s;
    for (auto& [x, w] : mF.atoms) s.add(w * diff(x));
    for (auto& [x, w] : mG.atoms) s.add(-w * diff(x));
    return s.value();
}

struct DiskMass {
    double mass = 0;        // Laplacian mass of D(c, r) by the Jensen derivative
    double bound_sup = 0;   // (sup_{D(R)} u - u(c)) / log(R/r)
    double bound_norm = 0;  // 2 ||u||_{D(R)} / log(R/r)
};

// Radii are Euclidean; u is sampled on a 256-point polar net of the closed disk D(c, R).
inline DiskMass disk_mass_arch(const std::function<double(cplx)>& u, cplx c, double r, double R, int quad_n = 4096) {
    if (!(0 < r && r < R)) throw DomainError("disk mass needs 0 < r < R");
    auto mean = [&](double s) {
        KahanSum acc;
        for (int k = 0; k < quad_n; ++k) acc.add(u(c + std::polar(s, 2 * M_PI * (k + 0.5) / quad_n)));
        return acc.value() / quad_n;
    };
    double h = 1e-4;
    DiskMass D;
    D.mass = (mean(r * std::exp(h)) - mean(r * std::exp(-h))) / (2 * h);
    double sup = kNegInf, norm = 0;
    for (int i = 0; i <= 15; ++i)
        for (int k = 0; k < 16; ++k) {
            double v = u(c + std::polar(R * i / 15.0, 2 * M_PI * k / 16));
            sup = std::max(sup, v);
            norm = std::max(norm, std::fabs(v));
        }
    double lg = std::log(R / r);
    D.bound_sup = (sup - u(c)) / lg;
    D.bound_norm = 2 * norm / lg;
    return D;
}

}  // namespace hybrid
