#include "util.hpp"

#include <gtest/gtest.h>

using namespace hybrid;
using namespace testutil;

namespace {
PLFunction<Rational> rand_pl(std::mt19937_64& rng, const MetricGraph& g, bool vanish_on_boundary) {
    PLFunction<Rational> u{g, {}};
    for (int v = 0; v < g.size(); ++v) u.values.push_back(rand_rat(rng, -9, 9, 5));
    if (vanish_on_boundary)
        for (int b : g.boundary) u.values[b] = 0;
    return u;
}
}  // namespace

TEST(Graphs, BasicShape) {
    MetricGraph g;
    for (int i = 0; i < 4; ++i) g.add_vertex();
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, rat(1, 2));
    EXPECT_FALSE(g.connected());
    g.add_edge(1, 3, 2);
    EXPECT_TRUE(g.is_tree());
    EXPECT_EQ(g.leaves(), (std::vector<int>{0, 2, 3}));
    EXPECT_THROW(g.add_edge(0, 0, 1), DomainError);
    EXPECT_THROW(g.add_edge(0, 1, 0), DomainError);
}

TEST(Graphs, LaplacianHasTotalMassZero) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 30; ++t) {
        MetricGraph g = rand_tree(rng, 2 + t);
        EXPECT_EQ(graph_laplacian(rand_pl(rng, g, false)).total(), 0);
    }
}

TEST(Graphs, LaplacianIsSymmetric) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 30; ++t) {
        MetricGraph g = rand_tree(rng, 3 + t);
        auto u = rand_pl(rng, g, true), v = rand_pl(rng, g, true);
        EXPECT_EQ(pair_with_laplacian(u, v), pair_with_laplacian(v, u));
        // Dirichlet energy: -sum u dDelta u = sum slope^2 * length >= 0
        EXPECT_LE(pair_with_laplacian(u, u), 0);
    }
}

TEST(Graphs, LaplacianOfLinearFunctionOnSegment) {
    MetricGraph g;
    for (int i = 0; i < 3; ++i) g.add_vertex();
    g.add_edge(0, 1, 2);
    g.add_edge(1, 2, 3);
    // u = |x - x1| style kink at the middle vertex
    PLFunction<Rational> u{g, {Rational(2), Rational(0), Rational(3)}};
    auto L = graph_laplacian(u);
    EXPECT_EQ(L.weight(0), -1);
    EXPECT_EQ(L.weight(1), 2);
    EXPECT_EQ(L.weight(2), -1);
}

TEST(Graphs, SubdivisionKeepsLaplacian) {
    std::mt19937_64 rng(4);
    MetricGraph g = rand_tree(rng, 8);
    auto u = rand_pl(rng, g, false);
    auto L0 = graph_laplacian(u);
    Rational t = g.edges[3].len / 3;
    Rational mid = u.at(3, t);
    int m = u.graph.subdivide(3, t);
    u.values.push_back(mid);
    auto L1 = graph_laplacian(u);
    EXPECT_EQ(L1.weight(m), 0);
    for (int v = 0; v < g.size(); ++v) EXPECT_EQ(L1.weight(v), L0.weight(v));
}

TEST(Graphs, DirichletExtensionIsHarmonicAndBounded) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        MetricGraph g = rand_tree(rng, 3 + 2 * t);
        std::map<int, Rational> bv;
        for (int b : g.boundary) bv[b] = rand_rat(rng, -10, 10, 3);
        auto u = dirichlet_extend(g, bv);
        auto L = graph_laplacian(u);
        Rational lo = bv.begin()->second, hi = lo;
        for (auto& [b, v] : bv) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            EXPECT_EQ(u.values[b], v);
        }
        for (int v = 0; v < g.size(); ++v) {
            if (bv.count(v)) continue;
            EXPECT_EQ(L.weight(v), 0);
            EXPECT_GE(u.values[v], lo);
            EXPECT_LE(u.values[v], hi);
        }
    }
}

TEST(Graphs, DirichletInDoubles) {
    MetricGraph g;
    for (int i = 0; i < 3; ++i) g.add_vertex();
    g.add_edge(0, 1, 1);
    g.add_edge(1, 2, 3);
    auto u = dirichlet_extend<double>(g, {{0, 0.0}, {2, 4.0}});
    EXPECT_NEAR(u.values[1], 1.0, 1e-14);
}

TEST(Graphs, MassBoundOnPath) {
    // path at heights -2, 0, 1, 2 carrying max(q, 0)
    MetricGraph g;
    for (int i = 0; i < 4; ++i) g.add_vertex();
    g.add_edge(0, 1, 2);
    g.add_edge(1, 2, 1);
    g.add_edge(2, 3, 1);
    PLFunction<Rational> u{g, {Rational(0), Rational(0), Rational(1), Rational(2)}};
    auto rep = mass_in(u, {0, 1, 2}, Rational(1));
    EXPECT_EQ(rep.mass, 1);
    EXPECT_EQ(rep.outgoing, 1);
    EXPECT_EQ(rep.bound, 2);
    EXPECT_TRUE(rep.subharmonic);
    EXPECT_THROW(mass_in(u, {0, 1, 2}, Rational(2)), DomainError);
}
