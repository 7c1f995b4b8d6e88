#include "util.hpp"

#include <gtest/gtest.h>

using namespace hybrid;
using namespace testutil;

TEST(Places, ConstructorsValidate) {
    EXPECT_THROW(Place::arch(0), DomainError);
    EXPECT_THROW(Place::arch(rat(3, 2)), DomainError);
    EXPECT_THROW(Place::padic(4), DomainError);
    EXPECT_THROW(Place::padic(5, -1), DomainError);
    EXPECT_THROW(Place::residue(1), DomainError);
    EXPECT_NO_THROW(Place::padic(7, rat(1, 3)));
    EXPECT_EQ(describe(Place::padic(3, 2)), "padic(p=3;eps=2)");
    EXPECT_EQ(describe(Place::arch(rat(1, 2))), "arch(eps=1/2)");
}

TEST(Places, PadicAbsIsMinusEpsTimesValuation) {
    Place y = Place::padic(3, rat(1, 2));
    EXPECT_EQ(*abs_log_units(y, Rational(9)), Rational(-1));
    EXPECT_EQ(*abs_log_units(y, rat(5, 27)), rat(3, 2));
    EXPECT_FALSE(abs_log_units(y, Rational(0)).has_value());
    EXPECT_NEAR(abs_log(y, rat(1, 3)).value(), 0.5 * std::log(3.0), 1e-15);
}

TEST(Places, ArchimedeanScalesByEpsilon) {
    Place y = Place::arch(rat(2, 5));
    EXPECT_NEAR(abs_log(y, rat(-7, 3)).value(), 0.4 * std::log(7.0 / 3), 1e-14);
    EXPECT_NEAR(abs_log_complex(y, {3, 4}), 0.4 * std::log(5.0), 1e-14);
    EXPECT_TRUE(abs_log(y, Rational(0)).is_neg_inf());
}

TEST(Places, HugeRationalsDoNotOverflow) {
    Rational big = rpow(Rational(10), 400) / 3;
    EXPECT_NEAR(abs_log(Place::arch(1), big).value(), 400 * std::log(10.0) - std::log(3.0), 1e-9);
}

TEST(Places, TrivialAndResidue) {
    Place t = Place::trivial(), r = Place::residue(5);
    EXPECT_EQ(*abs_log_units(t, rat(-12, 7)), 0);
    EXPECT_FALSE(abs_log_units(t, Rational(0)).has_value());
    EXPECT_EQ(*abs_log_units(r, rat(3, 7)), 0);
    EXPECT_FALSE(abs_log_units(r, rat(10, 3)).has_value());
    EXPECT_THROW(abs_log_units(r, rat(1, 5)), DomainError);
}

TEST(Places, MultiplicativeAndUltrametric) {
    std::mt19937_64 rng(11);
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul})
        for (int i = 0; i < 200; ++i) {
            Place y = Place::padic(p, rat(1 + i % 3, 2));
            Rational a = rand_nonzero(rng, -200, 200, 60), b = rand_nonzero(rng, -200, 200, 60);
            EXPECT_EQ(*abs_log_units(y, a * b), *abs_log_units(y, a) + *abs_log_units(y, b));
            if (a + b != 0) { EXPECT_LE(*abs_log_units(y, a + b), std::max(*abs_log_units(y, a), *abs_log_units(y, b))); }
        }
}

TEST(Places, FlowScalesExponent) {
    EXPECT_EQ(flow_place(Place::padic(5, rat(2, 3)), rat(1, 2)).eps, rat(1, 3));
    EXPECT_EQ(flow_place(Place::arch(1), rat(1, 4)).eps, rat(1, 4));
    EXPECT_EQ(flow_place(Place::trivial(), rat(1, 4)).kind, PlaceKind::Trivial);
    EXPECT_THROW(epsilon_of(Place::trivial()), DomainError);
}

TEST(Rationals, ParseAndSnap) {
    EXPECT_EQ(parse_rational("-3/6"), rat(-1, 2));
    EXPECT_EQ(parse_rational("0.6"), rat(3, 5));
    EXPECT_EQ(parse_rational("42"), Rational(42));
    EXPECT_THROW(parse_rational("1/0"), DomainError);
    EXPECT_THROW(parse_rational("abc"), DomainError);
    EXPECT_EQ(snap(0.333333333333), rat(1, 3));
    EXPECT_EQ(vp(rat(50, 3), 5), 2);
    EXPECT_EQ(vp(rat(2, 75), 5), -2);
    EXPECT_EQ(floor_rat(rat(-7, 2)), Rational(-4));
    EXPECT_EQ(ceil_rat(rat(7, 2)), Rational(4));
}

TEST(Rationals, KahanBeatsNaiveSum) {
    KahanSum k;
    double naive = 0;
    for (int i = 0; i < 1000000; ++i) {
        k.add(0.1);
        naive += 0.1;
    }
    EXPECT_LT(std::fabs(k.value() - 100000.0), std::fabs(naive - 100000.0));
    EXPECT_NEAR(k.value(), 100000.0, 1e-8);
}
