#pragma once
// Affable test functions: in each chart, a difference of maxima of offset + sum q_i log|g_i|.

#include "measure.hpp"
#include "skeleton.hpp"

#include <random>
#include <string>
#include <vector>

namespace hybrid {

// offset + sum q_i log|g_i|, q_i > 0. A term without factors is a constant.
struct LogTerm {
    Rational offset;
    std::vector<std::pair<Rational, Poly>> factors;
};

// Pointwise max of its terms; no terms at all would be -infinity and is rejected.
struct Piece {
    std::vector<LogTerm> terms;

    static Piece constant(const Rational& c) { return Piece{{LogTerm{c, {}}}}; }
    // max(q0, q1 log|g1|, ...) with q0 = nullopt meaning -infinity
    static Piece basic(std::optional<Rational> q0, const std::vector<std::pair<Rational, Poly>>& t) {
        Piece p;
        if (q0) p.terms.push_back(LogTerm{*q0, {}});
        for (auto& [q, g] : t) {
            if (q < 0) throw DomainError("affable exponents must be nonnegative");
            if (g.zero()) throw DomainError("log of the zero polynomial");
            if (q == 0) p.terms.push_back(LogTerm{0, {}});
            else p.terms.push_back(LogTerm{0, {{q, g}}});
        }
        if (p.terms.empty()) throw DomainError("a piece needs at least one finite branch");
        return p;
    }
};

struct ChartFn {
    Piece plus = Piece::constant(0), minus = Piece::constant(0);
};

enum class Chart { Zero, Inf };

struct AffableFn {
    std::string id;
    ChartFn chart0, chartInf;  // coordinates T and U = 1/T

    const ChartFn& chart(Chart c) const { return c == Chart::Zero ? chart0 : chartInf; }
    ChartFn& chart(Chart c) { return c == Chart::Zero ? chart0 : chartInf; }

    static AffableFn constant(const Rational& c, std::string id = {}) {
        AffableFn f;
        f.id = std::move(id);
        f.chart0.plus = f.chartInf.plus = Piece::constant(c);
        return f;
    }
};

// ---- pointwise evaluation ----

// Chart whose closed unit disk contains x.
inline Chart chart_for(const Place& y, const BerkPoint& x) {
    if (x.is_inf()) return Chart::Inf;
    if (y.archimedean()) return std::abs(x.z) <= 1 ? Chart::Zero : Chart::Inf;
    XRat L = log_abs_T_units(y, x);
    return (!L || *L <= 0) ? Chart::Zero : Chart::Inf;
}

// log|g(coordinate)| at x, where the coordinate is T (chart 0) or U = 1/T.
inline double log_abs_in_chart(const Place& y, const BerkPoint& x, const Poly& g, Chart c) {
    if (c == Chart::Zero) {
        if (x.is_inf()) throw DomainError("chart-0 polynomial at infinity");
        return eval_log_abs(y, x, g).value();
    }
    if (x.is_inf()) return abs_log(y, g.coeff(0)).value();
    if (y.archimedean()) {
        if (x.z == cplx(0)) throw DomainError("chart-infinity polynomial at 0");
        return abs_log_complex(y, to_complex(g)(1.0 / x.z));
    }
    int k = g.degree();
    LogMag h = eval_log_abs(y, x, g.reversed(k));
    LogMag t = eval_log_abs(y, x, Poly({Rational(0), Rational(1)}));
    if (t.is_neg_inf()) throw DomainError("chart-infinity polynomial at 0");
    if (h.is_neg_inf()) return kNegInf;
    return h.value() - k * t.value();
}

inline double eval_piece(const Place& y, const Piece& p, const BerkPoint& x, Chart c) {
    double best = kNegInf;
    for (auto& t : p.terms) {
        double v = to_double(t.offset);
        for (auto& [q, g] : t.factors) {
            double l = log_abs_in_chart(y, x, g, c);
            if (l == kNegInf) { v = kNegInf; break; }
            v += to_double(q) * l;
        }
        best = std::max(best, v);
    }
    return best;
}

inline double eval_chart(const Place& y, const AffableFn& f, const BerkPoint& x, Chart c) {
    const ChartFn& cf = f.chart(c);
    double a = eval_piece(y, cf.plus, x, c), b = eval_piece(y, cf.minus, x, c);
    if (!std::isfinite(a) || !std::isfinite(b))
        throw NumericError("affable function '" + f.id + "' is infinite at " + to_string(x));
    return a - b;
}

inline double affable_eval(const Place& y, const AffableFn& f, const BerkPoint& x) {
    check_fiber(y, x);
    return eval_chart(y, f, x, chart_for(y, x));
}

inline PointFn as_point_fn(const Place& y, const AffableFn& f) {
    return [y, f](const BerkPoint& x) { return affable_eval(y, f, x); };
}

// ---- lattice and vector-space operations ----

inline Piece piece_sum(const Piece& a, const Piece& b) {
    Piece r;
    for (auto& s : a.terms)
        for (auto& t : b.terms) {
            LogTerm u{s.offset + t.offset, s.factors};
            for (auto& f : t.factors) {
                bool merged = false;
                for (auto& g : u.factors)
                    if (g.second == f.second) {
                        g.first += f.first;
                        merged = true;
                        break;
                    }
                if (!merged) u.factors.push_back(f);
            }
            r.terms.push_back(std::move(u));
        }
    return r;
}

inline Piece piece_scale(const Rational& q, const Piece& a) {
    if (q < 0) throw DomainError("pieces scale by nonnegative rationals");
    if (q == 0) return Piece::constant(0);
    Piece r = a;
    for (auto& t : r.terms) {
        t.offset *= q;
        for (auto& f : t.factors) f.first *= q;
    }
    return r;
}

inline Piece piece_union(const Piece& a, const Piece& b) {
    Piece r = a;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    return r;
}

enum class CombineOp { Add, Max, Min, ScaleQ };

inline AffableFn affable_scale(const Rational& q, const AffableFn& f) {
    AffableFn r;
    r.id = f.id;
    for (Chart c : {Chart::Zero, Chart::Inf}) {
        const ChartFn& a = f.chart(c);
        ChartFn& o = r.chart(c);
        Rational m = q < 0 ? Rational(-q) : q;
        o.plus = piece_scale(m, q < 0 ? a.minus : a.plus);
        o.minus = piece_scale(m, q < 0 ? a.plus : a.minus);
    }
    return r;
}

inline AffableFn affable_combine(CombineOp op, const AffableFn& f, const AffableFn& g, const Rational& q = 1) {
    if (op == CombineOp::ScaleQ) return affable_scale(q, f);
    if (op == CombineOp::Min)
        return affable_scale(-1, affable_combine(CombineOp::Max, affable_scale(-1, f), affable_scale(-1, g)));
    AffableFn r;
    r.id = f.id + (op == CombineOp::Add ? "+" : "v") + g.id;
    for (Chart c : {Chart::Zero, Chart::Inf}) {
        const ChartFn &u = f.chart(c), &v = g.chart(c);
        ChartFn& o = r.chart(c);
        if (op == CombineOp::Add) {
            o.plus = piece_sum(u.plus, v.plus);
            o.minus = piece_sum(u.minus, v.minus);
        } else {
            // max(u+ - u-, v+ - v-) = max(u+ + v-, v+ + u-) - (u- + v-)
            o.plus = piece_union(piece_sum(u.plus, v.minus), piece_sum(v.plus, u.minus));
            o.minus = piece_sum(u.minus, v.minus);
        }
    }
    return r;
}

// Multiplies every constant by e: the rescaled function matching the flow x -> x^e.
inline AffableFn scale_constants(const AffableFn& f, const Rational& e) {
    AffableFn r = f;
    for (Chart c : {Chart::Zero, Chart::Inf})
        for (Piece* p : {&r.chart(c).plus, &r.chart(c).minus})
            for (auto& t : p->terms) t.offset *= e;
    return r;
}

// ---- chart consistency ----

inline std::vector<BerkPoint> overlap_probes(const Place& y) {
    std::vector<BerkPoint> P;
    if (y.archimedean()) {
        for (double r : {0.6, 0.9, 1.2, 1.8})
            for (double th : {0.3, 1.9, 3.5, 5.1}) P.push_back(BerkPoint::classical(std::polar(r, th)));
    } else {
        for (long long a : {0, 1, -1, 3})
            for (auto s : {rat(-1, 2), rat(-1, 4), rat(0), rat(1, 4)}) P.push_back(BerkPoint::disk(a, s));
    }
    return P;
}

// Largest chart disagreement over the 16 probes.
inline double chart_mismatch(const Place& y, const AffableFn& f) {
    double worst = 0;
    for (auto& x : overlap_probes(y)) {
        double a = eval_chart(y, f, x, Chart::Zero), b = eval_chart(y, f, x, Chart::Inf);
        worst = std::max(worst, std::fabs(a - b));
    }
    return worst;
}

// ---- fiber mass bound ----

struct MassBound {
    double chart0 = 0, chartInf = 0, total = 0;
};

constexpr double kSentinel = -1e6;

// (2/log(R/r)) (||f+|| + ||f-||) on the closed disk of radius R, per chart, summed.
inline MassBound mass_bound(const Place& y, const AffableFn& f, double R = 4, double r = 2,
                            const std::vector<BerkPoint>& ultrametric_net = {}) {
    std::vector<BerkPoint> net;
    if (y.archimedean()) {
        double Re = std::pow(R, 1.0 / to_double(y.eps));
        for (int i = 0; i <= 15; ++i)
            for (int k = 0; k < 16; ++k) net.push_back(BerkPoint::classical(std::polar(Re * i / 15.0, 2 * M_PI * (k + 0.25) / 16)));
    } else if (!ultrametric_net.empty()) {
        net = ultrametric_net;
    } else {
        for (long long s = -2; s <= 2; ++s) net.push_back(BerkPoint::disk(0, s));
        for (long long a : {1, -1}) net.push_back(BerkPoint::disk(a, -1));
    }
    MassBound B;
    double k = 2 / std::log(R / r);
    for (Chart c : {Chart::Zero, Chart::Inf}) {
        double np = 0, nm = 0;
        for (auto& x : net) {
            // the net lives in the chart coordinate itself
            double a = std::max(kSentinel, eval_piece(y, f.chart(c).plus, x, Chart::Zero));
            double b = std::max(kSentinel, eval_piece(y, f.chart(c).minus, x, Chart::Zero));
            np = std::max(np, std::fabs(a));
            nm = std::max(nm, std::fabs(b));
        }
        (c == Chart::Zero ? B.chart0 : B.chartInf) = k * (np + nm);
    }
    B.total = B.chart0 + B.chartInf;
    return B;
}

// ---- exact piecewise-linear restriction to skeleta ----

// Continuous PL function of one rational variable, breakpoints sorted.
struct PL1 {
    std::vector<std::pair<Rational, Rational>> pts;

    Rational at(const Rational& x) const {
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (x <= pts[i + 1].first) {
                auto& [x0, y0] = pts[i];
                auto& [x1, y1] = pts[i + 1];
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
            }
        return pts.back().second;
    }
    void simplify() {
        std::vector<std::pair<Rational, Rational>> out;
        for (auto& p : pts) {
            if (!out.empty() && out.back().first == p.first) continue;
            while (out.size() >= 2) {
                auto& a = out[out.size() - 2];
                auto& b = out.back();
                if ((b.second - a.second) * (p.first - b.first) == (p.second - b.second) * (b.first - a.first))
                    out.pop_back();
                else break;
            }
            out.push_back(p);
        }
        pts = std::move(out);
    }
};

namespace detail {
inline std::vector<Rational> merged_xs(const PL1& a, const PL1& b) {
    std::vector<Rational> xs;
    for (auto& p : a.pts) xs.push_back(p.first);
    for (auto& p : b.pts) xs.push_back(p.first);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

inline PL1 pl_sum(const PL1& a, const PL1& b, const Rational& qa = 1, const Rational& qb = 1) {
    PL1 r;
    for (auto& x : merged_xs(a, b)) r.pts.push_back({x, qa * a.at(x) + qb * b.at(x)});
    r.simplify();
    return r;
}

inline PL1 pl_max(const PL1& a, const PL1& b) {
    auto xs = merged_xs(a, b);
    PL1 r;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        Rational da = a.at(xs[i]) - b.at(xs[i]);
        r.pts.push_back({xs[i], std::max(a.at(xs[i]), b.at(xs[i]))});
        if (i + 1 < xs.size()) {
            Rational db = a.at(xs[i + 1]) - b.at(xs[i + 1]);
            if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
                Rational xc = xs[i] + (xs[i + 1] - xs[i]) * da / (da - db);
                r.pts.push_back({xc, a.at(xc)});
            }
        }
    }
    r.simplify();
    return r;
}

inline PL1 pl_const(const Rational& c, const Rational& s0, const Rational& s1) {
    return PL1{{{s0, c}, {s1, c}}};
}

// s -> log|g|(eta_{a,s}) on [s0, s1], in units: upper envelope of alpha_i + i s.
inline PL1 pl_log_abs(const Place& y, const Poly& g, const Rational& a, const Rational& s0, const Rational& s1) {
    Poly S = g.taylor_shift(a);
    std::vector<std::pair<Rational, int>> lines;
    for (int i = 0; i <= S.degree(); ++i)
        if (S.c[i] != 0) lines.push_back({*abs_log_units(y, S.c[i]), i});
    std::vector<Rational> xs{s0, s1};
    for (std::size_t i = 0; i < lines.size(); ++i)
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            Rational x = (lines[i].first - lines[j].first) / Rational(lines[j].second - lines[i].second);
            if (x > s0 && x < s1) xs.push_back(x);
        }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    PL1 r;
    for (auto& x : xs) {
        std::optional<Rational> best;
        for (auto& [al, i] : lines) {
            Rational v = al + Rational(i) * x;
            if (!best || v > *best) best = v;
        }
        r.pts.push_back({x, *best});
    }
    r.simplify();
    return r;
}

inline Rational offset_units(const Place& y, const Rational& off) {
    if (off == 0 || y.kind != PlaceKind::Padic) return off;
    throw DomainError("constant " + to_string(off) + " is not a rational multiple of log p");
}

inline PL1 pl_piece(const Place& y, const Piece& p, Chart c, const Rational& a, const Rational& s0, const Rational& s1) {
    std::optional<PL1> best;
    Poly T({Rational(0), Rational(1)});
    for (auto& t : p.terms) {
        PL1 v = pl_const(offset_units(y, t.offset), s0, s1);
        for (auto& [q, g] : t.factors) {
            if (c == Chart::Zero) v = pl_sum(v, pl_log_abs(y, g, a, s0, s1), 1, q);
            else {
                int k = g.degree();
                v = pl_sum(v, pl_log_abs(y, g.reversed(k), a, s0, s1), 1, q);
                v = pl_sum(v, pl_log_abs(y, T, a, s0, s1), 1, -q * k);
            }
        }
        best = best ? pl_max(*best, v) : v;
    }
    return *best;
}

inline PL1 pl_affable(const Place& y, const AffableFn& f, const Rational& a, const Rational& s0, const Rational& s1) {
    // chart 0 where |T| <= 1 along the path eta_{a,s}
    XRat la = abs_log_units(y, a);
    std::vector<std::pair<Rational, Rational>> parts;
    bool a_in_unit = !la || *la <= 0;
    if (a_in_unit && s0 < 0 && s1 > 0) parts = {{s0, 0}, {0, s1}};
    else parts = {{s0, s1}};
    PL1 out;
    for (auto& [u, v] : parts) {
        Chart c = (a_in_unit && v <= 0) ? Chart::Zero : Chart::Inf;
        const ChartFn& cf = f.chart(c);
        PL1 part = pl_sum(pl_piece(y, cf.plus, c, a, u, v), pl_piece(y, cf.minus, c, a, u, v), 1, -1);
        for (auto& p : part.pts) out.pts.push_back(p);
    }
    out.simplify();
    return out;
}
}  // namespace detail

struct Restriction {
    PLFunction<Rational> u;      // values in place units
    std::vector<int> inserted;   // vertices added at kinks
};

// Exact PL restriction; edges are subdivided at every kink of f.
inline Restriction restrict_to_skeleton(const Place& y, const AffableFn& f, const MetricGraph& skel) {
    if (y.archimedean()) throw DomainError("restriction to skeleta needs an ultrametric place");
    Restriction R;
    R.u.graph = skel;
    MetricGraph& g = R.u.graph;
    std::size_t n_edges = g.edges.size();
    for (std::size_t e = 0; e < n_edges; ++e) {
        Edge E = g.edges[e];
        // copies: subdividing below grows the label vector
        const BerkPoint A = *g.labels[E.a], B = *g.labels[E.b];
        if (!A.is_disk() || !B.is_disk()) throw DomainError("skeleton vertices must be disk points");
        bool a_child = A.logr < B.logr;
        const BerkPoint C = a_child ? A : B;
        const BerkPoint P = a_child ? B : A;
        if (P.logr - C.logr != E.len || !in_disk(y, C, P))
            throw DomainError("edge does not follow a radius path");
        PL1 pl = detail::pl_affable(y, f, C.center(), C.logr, P.logr);
        std::vector<std::pair<Rational, Rational>> kinks;  // (offset from a-endpoint, radius)
        for (std::size_t k = 1; k + 1 < pl.pts.size(); ++k) {
            const Rational& s = pl.pts[k].first;
            kinks.push_back({a_child ? s - C.logr : P.logr - s, s});
        }
        std::sort(kinks.begin(), kinks.end());
        int cur = int(e);
        Rational done = 0;
        for (auto& [t, s] : kinks) {
            int m = g.subdivide(cur, t - done, canonical(y, BerkPoint::disk(C.center(), s)));
            R.inserted.push_back(m);
            cur = int(g.edges.size()) - 1;
            done = t;
        }
    }
    R.u.values.assign(g.size(), Rational(0));
    for (int v = 0; v < g.size(); ++v) {
        const BerkPoint& x = *g.labels[v];
        Rational a = x.center();
        PL1 pl = detail::pl_affable(y, f, a, x.logr, x.logr + 1);
        R.u.values[v] = pl.pts.front().second;
    }
    return R;
}

// Random probe points for the pointwise laws.
inline std::vector<BerkPoint> random_probes(const Place& y, std::mt19937_64& rng, int n) {
    std::vector<BerkPoint> P;
    std::uniform_int_distribution<int> I(-6, 6);
    std::uniform_real_distribution<double> U(-2.5, 2.5);
    for (int i = 0; i < n; ++i) {
        if (y.archimedean()) P.push_back(BerkPoint::classical(cplx(U(rng), U(rng))));
        else P.push_back(BerkPoint::disk(rat(I(rng), 3), rat(I(rng), 4)));
    }
    return P;
}

}  // namespace hybrid
