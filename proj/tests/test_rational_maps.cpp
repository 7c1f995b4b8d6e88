#include "util.hpp"

#include <gtest/gtest.h>

using namespace hybrid;
using namespace testutil;

namespace {
Poly from_roots(const std::vector<Rational>& r) {
    Poly p{Rational(1)};
    for (auto& a : r) p = p * linear(a);
    return p;
}
}  // namespace

TEST(Maps, ResultantMatchesRootProduct) {
    // Res(prod (T0 - r_i T1), G) = +-prod G(r_i, 1) for monic F0 of full degree
    std::mt19937_64 rng(8);
    for (int d = 1; d <= 5; ++d)
        for (int t = 0; t < 10; ++t) {
            std::vector<Rational> roots;
            for (int i = 0; i < d; ++i) roots.push_back(rand_rat(rng, -6, 6, 3));
            Poly f = from_roots(roots), g = rand_poly(rng, d);
            Rational prod = 1;
            for (auto& r : roots) prod *= g(r);
            Rational R = resultant(f, g, d);
            EXPECT_EQ(R < 0 ? Rational(-R) : R, prod < 0 ? Rational(-prod) : prod);
        }
}

TEST(Maps, ResultantScalesAndVanishes) {
    Poly f{-1, 0, 1}, g{0, 2};
    EXPECT_EQ(resultant(f, g, 2), -4);
    EXPECT_EQ(resultant(Rational(3) * f, g, 2), 9 * resultant(f, g, 2));
    EXPECT_EQ(resultant(Poly{0, 0, 1}, Poly{1}, 2), 1);
    EXPECT_THROW(make_lift(2, Poly{-1, 0, 1}, linear(1)), DomainError);
    EXPECT_THROW(make_lift(2, Poly{0, 0, 0, 1}, Poly{1}), DomainError);
}

TEST(Maps, ComplexResultantAgrees) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        Poly f = rand_poly(rng, 3), g = rand_poly(rng, 2);
        Rational R = resultant(f, g, 3);
        cplx C = resultant(to_complex(f), to_complex(g), 3);
        EXPECT_NEAR(C.real(), to_double(R), 1e-8 * (1 + std::fabs(to_double(R))));
    }
}

TEST(Maps, RootsWithMultiplicity) {
    Poly P = from_roots({1, 1, -2});
    auto r = polynomial_roots(to_complex(P));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0].first.real(), -2, 1e-10);
    EXPECT_EQ(r[0].second, 1);
    EXPECT_NEAR(r[1].first.real(), 1, 1e-7);
    EXPECT_EQ(r[1].second, 2);
}

TEST(Maps, PreimagesSumToDegree) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int d = 2; d <= 5; ++d)
        for (int t = 0; t < 20; ++t) {
            HomogeneousLift F = make_lift(d, rand_poly(rng, d), rand_poly(rng, t % d));
            cplx w(U(rng), U(rng));
            auto S = preimages_arch(F, BerkPoint::classical(w));
            EXPECT_EQ(S.total(), d);
            for (auto& [x, m] : S.points) {
                if (x.is_inf()) continue;
                BerkPoint fx = apply_point(Place::arch(1), F, x);
                if (!fx.is_inf()) { EXPECT_NEAR(std::abs(fx.z - w), 0, 1e-6 * (1 + std::abs(w))); }
            }
        }
}

TEST(Maps, PolynomialPreimageOfInfinity) {
    HomogeneousLift F = polynomial_map(Poly{1, 0, 1});
    auto S = preimages_arch(F, BerkPoint::infinity());
    ASSERT_EQ(S.points.size(), 1u);
    EXPECT_TRUE(S.points[0].first.is_inf());
    EXPECT_EQ(S.points[0].second, 2);
}

TEST(Maps, DiskTransport) {
    Place y = Place::padic(3);
    HomogeneousLift F = polynomial_map(Poly{3, 0, 1});  // T^2 + 3
    EXPECT_TRUE(same_point(y, apply_point(y, F, BerkPoint::gauss()), BerkPoint::gauss()));
    EXPECT_TRUE(same_point(y, apply_point(y, F, BerkPoint::disk(0, 1)), BerkPoint::disk(0, 2)));
    // eta(0,-2) maps to the disk around 3 of radius |3|^... = max(|T^2|) = -4 around 3
    EXPECT_TRUE(same_point(y, apply_point(y, F, BerkPoint::disk(0, -2)), BerkPoint::disk(3, -4)));
    HomogeneousLift G = make_lift(2, Poly{0, 0, 1}, Poly{1, 0, 1});
    EXPECT_THROW(apply_point(y, G, BerkPoint::gauss()), UnsupportedError);
}

TEST(Maps, TransportCommutesWithFlow) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> A(-20, 20), R(-6, 6);
    for (auto e : {rat(1, 2), rat(1, 3), rat(2, 5)}) {
        Place y = Place::padic(2), ye = flow_place(y, e);
        for (int t = 0; t < 30; ++t) {
            HomogeneousLift F = polynomial_map(rand_poly(rng, 2 + t % 3));
            BerkPoint x = BerkPoint::disk(A(rng), rat(R(rng), 3));
            BerkPoint a = apply_point(ye, F, flow_point(x, e));
            BerkPoint b = flow_point(apply_point(y, F, x), e);
            EXPECT_TRUE(same_point(ye, a, b)) << to_string(a) << " vs " << to_string(b);
        }
    }
}

TEST(Maps, PushforwardOfOneIsDegree) {
    HomogeneousLift F = make_lift(3, Poly{1, 0, 2, 1}, Poly{0, 1});
    double v = pushforward_values(F, [](const BerkPoint&) { return 1.0; }, BerkPoint::classical(cplx(0.3, 0.1)));
    EXPECT_NEAR(v, 3.0, 1e-14);
}
