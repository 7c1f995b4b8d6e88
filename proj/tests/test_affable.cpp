#include "util.hpp"

#include <gtest/gtest.h>

using namespace hybrid;
using namespace testutil;

namespace {
std::vector<AffableFn> battery() { return battery_from_json(read_json_file(std::string(HYBRID_DATA_DIR) + "/affable_battery.json")); }

const AffableFn& by_id(const std::vector<AffableFn>& b, const std::string& id) {
    for (auto& f : b)
        if (f.id == id) return f;
    throw std::runtime_error("missing " + id);
}

std::vector<Place> fibers() {
    return {Place::arch(1), Place::arch(rat(1, 8)), Place::padic(3), Place::padic(2, rat(1, 2)), Place::trivial()};
}

// log|T - a| as an affable function, both charts
AffableFn log_dist(const Rational& a) {
    AffableFn f;
    f.id = "logdist";
    f.chart0.plus = Piece::basic(std::nullopt, {{1, linear(a)}});
    f.chartInf.plus = Piece::basic(std::nullopt, {{1, Poly{Rational(1), -a}}});
    f.chartInf.minus = Piece::basic(std::nullopt, {{1, Poly{Rational(0), Rational(1)}}});
    return f;
}
}  // namespace

TEST(Affable, BatteryHasEightFunctionsAndConsistentCharts) {
    auto B = battery();
    ASSERT_EQ(B.size(), 8u);
    for (auto& y : fibers())
        for (auto& f : B) EXPECT_LT(chart_mismatch(y, f), 1e-12) << f.id << " at " << describe(y);
}

TEST(Affable, BatteryPointValues) {
    auto B = battery();
    Place y = Place::arch(1);
    BerkPoint x = BerkPoint::classical(cplx(4, 0));
    EXPECT_NEAR(affable_eval(y, by_id(B, "g_minus2"), x), std::log(2.0), 1e-14);
    EXPECT_NEAR(affable_eval(y, by_id(B, "g_0"), x), std::log(4.0), 1e-14);
    EXPECT_NEAR(affable_eval(y, by_id(B, "g_sq_plus1"), x), 0.5 * std::log(17.0), 1e-14);
    EXPECT_NEAR(affable_eval(y, by_id(B, "diff_0_2"), x), std::log(2.0), 1e-14);
    EXPECT_NEAR(affable_eval(y, by_id(B, "one"), BerkPoint::infinity()), 1, 0);
    EXPECT_NEAR(affable_eval(y, by_id(B, "diff_0_2"), BerkPoint::infinity()), 0, 1e-15);
    EXPECT_NEAR(affable_eval(y, by_id(B, "floor_t_minus1"), BerkPoint::classical(Rational(1))), -1, 0);
    Place p = Place::padic(3);
    EXPECT_NEAR(affable_eval(p, by_id(B, "g_0"), BerkPoint::disk(0, 2)), 2 * std::log(3.0), 1e-14);
    EXPECT_NEAR(affable_eval(p, by_id(B, "g_minus2"), BerkPoint::gauss()), 0, 0);
}

TEST(Affable, JsonRoundTrip) {
    for (auto& f : battery()) {
        AffableFn g = affable_from_json(to_json(f));
        for (auto& y : fibers()) {
            std::mt19937_64 rng(1);
            for (auto& x : random_probes(y, rng, 10)) EXPECT_EQ(affable_eval(y, f, x), affable_eval(y, g, x));
        }
    }
}

TEST(Affable, VectorSpaceAndLatticeLaws) {
    auto B = battery();
    std::mt19937_64 rng(2);
    for (auto& y : fibers()) {
        auto probes = random_probes(y, rng, 25);
        for (std::size_t i = 0; i + 1 < B.size(); ++i) {
            const AffableFn &f = B[i], &g = B[i + 1];
            AffableFn s = affable_combine(CombineOp::Add, f, g), m = affable_combine(CombineOp::Max, f, g),
                      n = affable_combine(CombineOp::Min, f, g), q = affable_combine(CombineOp::ScaleQ, f, g, rat(-3, 2));
            for (auto& x : probes) {
                double a = affable_eval(y, f, x), b = affable_eval(y, g, x);
                EXPECT_NEAR(affable_eval(y, s, x), a + b, 1e-12);
                EXPECT_NEAR(affable_eval(y, m, x), std::max(a, b), 1e-12);
                EXPECT_NEAR(affable_eval(y, n, x), std::min(a, b), 1e-12);
                EXPECT_NEAR(affable_eval(y, q, x), -1.5 * a, 1e-12);
            }
        }
    }
}

TEST(Affable, FlowRescalesUltrametricValues) {
    auto B = battery();
    std::mt19937_64 rng(6);
    for (auto e : {rat(1, 2), rat(1, 3), rat(2, 5)}) {
        Place y = Place::padic(5), ye = flow_place(y, e);
        for (auto& x : random_probes(y, rng, 20))
            for (auto& f : B) {
                double lhs = affable_eval(ye, scale_constants(f, e), flow_point(x, e));
                EXPECT_NEAR(lhs, to_double(e) * affable_eval(y, f, x), 1e-12) << f.id;
            }
    }
}

TEST(Affable, PoincareLelongOnSegment) {
    // log|T(T-9)| over Q_3 on the segment eta(0,3^-3) .. eta(0,3^2)
    Place y = Place::padic(3);
    AffableFn f = affable_combine(CombineOp::Add, log_dist(0), log_dist(9));
    MetricGraph seg = build_skeleton(y, {BerkPoint::disk(0, -3), BerkPoint::disk(0, 2)});
    auto R = restrict_to_skeleton(y, f, seg);
    ASSERT_EQ(R.inserted.size(), 1u);
    EXPECT_TRUE(same_point(y, *R.u.graph.labels[R.inserted[0]], BerkPoint::disk(0, -2)));
    auto L = graph_laplacian(R.u);
    // zeros 0 and 9 retract to eta(0,-3) and eta(0,-2); the double pole at infinity to the top
    for (auto& [v, w] : L.atoms) {
        const BerkPoint& x = *R.u.graph.labels[v];
        if (x.logr == -3) EXPECT_EQ(w, 1);
        else if (x.logr == -2) EXPECT_EQ(w, 1);
        else if (x.logr == 2) EXPECT_EQ(w, -2);
        else EXPECT_EQ(w, 0);
    }
}

TEST(Affable, RestrictionAgreesWithPointwiseValues) {
    Place y = Place::padic(2);
    auto B = battery();
    MetricGraph g = build_skeleton(y, {BerkPoint::disk(0, -2), BerkPoint::disk(3, -3), BerkPoint::disk(0, 3),
                                       BerkPoint::disk(rat(1, 2), -1)});
    for (auto& f : B) {
        // nonzero real constants are irrational in units of log 2
        if (f.id == "one" || f.id == "floor_t_minus1" || f.id == "mixed_t_plus1") {
            EXPECT_THROW(restrict_to_skeleton(y, f, g), DomainError);
            continue;
        }
        auto R = restrict_to_skeleton(y, f, g);
        for (int v = 0; v < R.u.graph.size(); ++v)
            EXPECT_NEAR(to_double(R.u.values[v]) * y.unit(), affable_eval(y, f, *R.u.graph.labels[v]), 1e-12) << f.id;
        // the restriction is affine between vertices: midpoints agree too
        for (int e = 0; e < int(R.u.graph.edges.size()); ++e) {
            const Edge& E = R.u.graph.edges[e];
            const BerkPoint& C = *R.u.graph.labels[E.a];
            Rational mid = E.len / 2;
            BerkPoint m = BerkPoint::disk(C.center(), C.logr + mid);
            EXPECT_NEAR(to_double(R.u.at(e, mid)) * y.unit(), affable_eval(y, f, m), 1e-12) << f.id;
        }
    }
}

TEST(Affable, TrivialPlaceAcceptsOffsets) {
    Place y = Place::trivial();
    auto B = battery();
    MetricGraph g = build_skeleton(y, {BerkPoint::disk(0, -2), BerkPoint::disk(1, -1), BerkPoint::disk(0, 2)});
    auto R = restrict_to_skeleton(y, by_id(B, "floor_t_minus1"), g);
    for (int v = 0; v < R.u.graph.size(); ++v)
        EXPECT_NEAR(to_double(R.u.values[v]), affable_eval(y, by_id(B, "floor_t_minus1"), *R.u.graph.labels[v]), 1e-12);
}

TEST(Affable, MassBoundIsFiniteAndPositive) {
    for (auto& y : fibers())
        for (auto& f : battery()) {
            MassBound M = mass_bound(y, f);
            EXPECT_TRUE(std::isfinite(M.total)) << f.id;
            EXPECT_GE(M.total, 0);
            if (f.id == "one") { EXPECT_NEAR(M.total, 4 / std::log(2.0), 1e-12); }
        }
}

TEST(Affable, InfiniteValuesAreReported) {
    Place y = Place::arch(1);
    EXPECT_THROW(affable_eval(y, log_dist(0), BerkPoint::classical(Rational(0))), NumericError);
}
