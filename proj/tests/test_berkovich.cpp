#include "util.hpp"

#include <gtest/gtest.h>

using namespace hybrid;
using namespace testutil;

namespace {
const Poly T{Rational(0), Rational(1)};

BerkPoint rand_disk(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> A(-30, 30), R(-8, 8);
    return BerkPoint::disk(rat(A(rng), 1 + (A(rng) & 3)), rat(R(rng), 4));
}
}  // namespace

TEST(Points, GaussNormIsMaxCoefficient) {
    Place y = Place::padic(3);
    EXPECT_EQ(*eval_units(y, BerkPoint::gauss(), Poly{9, 3, 1}), 0);
    EXPECT_EQ(*eval_units(y, BerkPoint::gauss(), Poly{9, 3}), -1);
    EXPECT_EQ(*eval_units(y, BerkPoint::gauss(), Poly{rat(1, 9), 3}), 2);
}

TEST(Points, DiskNormOfShiftedLinear) {
    Place y = Place::padic(5);
    // |T - 1| on eta(0, s) is max(s, 0); on eta(1, s) it is s
    for (int s = -3; s <= 3; ++s) {
        EXPECT_EQ(*eval_units(y, BerkPoint::disk(0, s), linear(1)), std::max(s, 0));
        EXPECT_EQ(*eval_units(y, BerkPoint::disk(1, s), linear(1)), s);
        EXPECT_EQ(*eval_units(y, BerkPoint::disk(26, s), linear(1)), std::max(s, -2));
    }
}

TEST(Points, SeminormIsMultiplicative) {
    std::mt19937_64 rng(5);
    for (unsigned long p : {2ul, 3ul, 7ul}) {
        Place y = Place::padic(p, rat(2, 3));
        for (int i = 0; i < 100; ++i) {
            BerkPoint x = rand_disk(rng);
            Poly P = rand_poly(rng, 1 + i % 4), Q = rand_poly(rng, 1 + i % 3);
            EXPECT_EQ(*eval_units(y, x, P * Q), *eval_units(y, x, P) + *eval_units(y, x, Q));
            EXPECT_LE(*eval_units(y, x, P + Q), std::max(*eval_units(y, x, P), *eval_units(y, x, Q)));
        }
    }
}

TEST(Points, EvaluationDoesNotDependOnCenterChoice) {
    Place y = Place::padic(3);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        BerkPoint x = rand_disk(rng);
        // any point of the disk is a center
        Rational shift = rpow(Rational(3), (-x.logr).convert_to<long long>() + 1) * (i % 5);
        BerkPoint x2 = BerkPoint::disk(x.center() + shift, x.logr);
        ASSERT_TRUE(same_point(y, x, x2));
        Poly P = rand_poly(rng, 3);
        EXPECT_EQ(*eval_units(y, x, P), *eval_units(y, x2, P));
        EXPECT_TRUE(same_point(y, x, canonical(y, x)));
        EXPECT_EQ(*eval_units(y, canonical(y, x), P), *eval_units(y, x, P));
    }
}

TEST(Points, FlowScalesEveryLogMagnitude) {
    std::mt19937_64 rng(17);
    for (auto e : {rat(1, 2), rat(1, 3), rat(2, 5)}) {
        Place y = Place::padic(3), ye = flow_place(y, e);
        for (int i = 0; i < 50; ++i) {
            BerkPoint x = rand_disk(rng);
            Poly P = rand_poly(rng, 1 + i % 5);
            EXPECT_EQ(*eval_units(ye, flow_point(x, e), P), e * *eval_units(y, x, P));
        }
    }
}

TEST(Points, InfinityAndClassical) {
    Place y = Place::padic(2);
    EXPECT_TRUE(eval_log_abs(y, BerkPoint::infinity(), T).is_pos_inf());
    EXPECT_EQ(*eval_log_abs(y, BerkPoint::infinity(), Poly{rat(1, 4)}).xunits(), 2);
    EXPECT_TRUE(eval_log_abs(y, BerkPoint::classical(Rational(3)), linear(3)).is_neg_inf());
    EXPECT_THROW(check_fiber(Place::arch(1), BerkPoint::gauss()), DomainError);
    EXPECT_THROW(check_fiber(y, BerkPoint::classical(cplx(0.5, 0.5))), DomainError);
}

TEST(Points, ArchimedeanEvaluation) {
    Place y = Place::arch(rat(1, 2));
    EXPECT_NEAR(eval_log_abs(y, BerkPoint::classical(cplx(0, 3)), Poly{1, 0, 1}).value(), 0.5 * std::log(8.0), 1e-14);
}

TEST(Points, JoinAndContainment) {
    Place y = Place::padic(3);
    BerkPoint a = BerkPoint::classical(Rational(0)), b = BerkPoint::classical(Rational(9));
    BerkPoint j = join(y, a, b);
    EXPECT_EQ(j.logr, -2);
    EXPECT_TRUE(in_disk(y, a, j));
    EXPECT_TRUE(in_disk(y, b, j));
    EXPECT_FALSE(in_disk(y, BerkPoint::classical(Rational(1)), j));
    EXPECT_TRUE(same_point(y, join(y, BerkPoint::disk(1, -1), BerkPoint::disk(4, -3)), BerkPoint::disk(1, -1)));
}

TEST(Points, TrivialAndResidueCanonicalForms) {
    Place t = Place::trivial(), r = Place::residue(5);
    EXPECT_TRUE(same_point(t, BerkPoint::disk(7, 0), BerkPoint::gauss()));
    EXPECT_FALSE(same_point(t, BerkPoint::disk(7, rat(-1, 2)), BerkPoint::disk(0, rat(-1, 2))));
    EXPECT_EQ(canonical(r, BerkPoint::disk(rat(13, 2), -1)).center(), Rational(4));  // 13/2 = 4 mod 5
    EXPECT_EQ(*eval_units(t, BerkPoint::disk(3, -1), linear(3)), -1);
}

TEST(Skeleton, TreeShapeAndLengths) {
    Place y = Place::padic(3);
    std::vector<BerkPoint> pts{BerkPoint::disk(0, -3), BerkPoint::disk(1, -2), BerkPoint::disk(9, -4),
                               BerkPoint::disk(0, 2)};
    MetricGraph g = build_skeleton(y, pts);
    EXPECT_TRUE(g.is_tree());
    for (auto& e : g.edges) EXPECT_EQ(e.len, g.labels[e.b]->logr - g.labels[e.a]->logr);
    // joins eta(0,-2) and eta(0,0) are added
    EXPECT_GE(find_vertex(y, g, BerkPoint::disk(0, -2)), 0);
    EXPECT_GE(find_vertex(y, g, BerkPoint::gauss()), 0);
    EXPECT_EQ(g.size(), 6);
}

TEST(Skeleton, PathLengthIsTreeDistance) {
    // distance in the tree between eta(a,r) and eta(b,s) equals r + s - 2 * radius of their join
    Place y = Place::padic(2);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<BerkPoint> pts;
        for (int i = 0; i < 5; ++i) pts.push_back(rand_disk(rng));
        MetricGraph g = build_skeleton(y, pts);
        ASSERT_TRUE(g.is_tree());
        // BFS distances from vertex 0
        auto adj = g.adjacency();
        std::vector<std::optional<Rational>> dist(g.size());
        dist[0] = Rational(0);
        std::vector<int> st{0};
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (auto [w, e] : adj[v])
                if (!dist[w]) {
                    dist[w] = *dist[v] + g.edges[e].len;
                    st.push_back(w);
                }
        }
        for (int v = 0; v < g.size(); ++v) {
            const BerkPoint &A = *g.labels[0], &B = *g.labels[v];
            BerkPoint J = join(y, A, B);
            EXPECT_EQ(*dist[v], (J.logr - A.logr) + (J.logr - B.logr));
        }
    }
}

TEST(Skeleton, RetractionLandsOnTheSegment) {
    Place y = Place::padic(3);
    MetricGraph g = build_skeleton(y, {BerkPoint::disk(0, -2), BerkPoint::disk(0, 2)});
    Location a = retract(y, BerkPoint::classical(Rational(0)), g);
    EXPECT_TRUE(same_point(y, a.point, BerkPoint::disk(0, -2)));
    Location b = retract(y, BerkPoint::classical(Rational(3)), g);
    EXPECT_TRUE(same_point(y, b.point, BerkPoint::disk(0, -1)));
    EXPECT_GE(b.edge, 0);
    Location c = retract(y, BerkPoint::classical(rat(1, 81)), g);
    EXPECT_TRUE(same_point(y, c.point, BerkPoint::disk(0, 2)));
    Location inf = retract(y, BerkPoint::infinity(), g);
    EXPECT_TRUE(same_point(y, inf.point, BerkPoint::disk(0, 2)));
}
