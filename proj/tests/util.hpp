#pragma once
#include "hybrid/hybrid.hpp"

#include <random>

namespace testutil {
using namespace hybrid;

inline Rational rand_rat(std::mt19937_64& rng, int lo = -20, int hi = 20, int maxden = 9) {
    std::uniform_int_distribution<int> N(lo, hi), D(1, maxden);
    return rat(N(rng), D(rng));
}

inline Rational rand_nonzero(std::mt19937_64& rng, int lo = -20, int hi = 20, int maxden = 9) {
    Rational q = 0;
    while (q == 0) q = rand_rat(rng, lo, hi, maxden);
    return q;
}

inline Poly rand_poly(std::mt19937_64& rng, int deg) {
    std::vector<Rational> c;
    for (int i = 0; i < deg; ++i) c.push_back(rand_rat(rng, -12, 12, 6));
    c.push_back(rand_nonzero(rng, -12, 12, 6));
    return Poly(c);
}

// Random tree with rational edge lengths; leaves form the boundary.
inline MetricGraph rand_tree(std::mt19937_64& rng, int n) {
    MetricGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex();
    for (int v = 1; v < n; ++v) {
        std::uniform_int_distribution<int> P(0, v - 1), L(1, 7), D(1, 4);
        g.add_edge(P(rng), v, rat(L(rng), D(rng)));
    }
    g.boundary = g.leaves();
    return g;
}
}  // namespace testutil
