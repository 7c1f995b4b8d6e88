#pragma once
// Finite metric graphs, piecewise-affine functions, Laplacians and the Dirichlet problem.

#include "berkovich.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace hybrid {

struct Edge {
    int a = 0, b = 0;
    Rational len;
};

struct MetricGraph {
    std::vector<std::optional<BerkPoint>> labels;  // one per vertex
    std::vector<Edge> edges;
    std::vector<int> boundary;

    int size() const { return int(labels.size()); }

    int add_vertex(std::optional<BerkPoint> label = std::nullopt) {
        labels.push_back(std::move(label));
        return size() - 1;
    }
    void add_edge(int a, int b, const Rational& len) {
        if (a < 0 || b < 0 || a >= size() || b >= size() || a == b)
            throw DomainError("bad edge endpoints");
        if (len <= 0) throw DomainError("edge lengths must be positive");
        edges.push_back({a, b, len});
    }

    // neighbor, edge index
    std::vector<std::vector<std::pair<int, int>>> adjacency() const {
        std::vector<std::vector<std::pair<int, int>>> adj(size());
        for (int e = 0; e < int(edges.size()); ++e) {
            adj[edges[e].a].push_back({edges[e].b, e});
            adj[edges[e].b].push_back({edges[e].a, e});
        }
        return adj;
    }

    bool connected() const {
        if (size() == 0) return false;
        auto adj = adjacency();
        std::vector<char> seen(size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, e] : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
        }
        return count == size();
    }

    bool is_tree() const { return connected() && int(edges.size()) == size() - 1; }

    std::vector<int> leaves() const {
        std::vector<int> deg(size(), 0);
        for (auto& e : edges) {
            ++deg[e.a];
            ++deg[e.b];
        }
        std::vector<int> out;
        for (int v = 0; v < size(); ++v)
            if (deg[v] <= 1) out.push_back(v);
        return out;
    }

    // Splits edge e at distance t from its endpoint a; returns the new vertex.
    int subdivide(int e, const Rational& t, std::optional<BerkPoint> label = std::nullopt) {
        Edge old = edges.at(e);
        if (t <= 0 || t >= old.len) throw DomainError("subdivision point must be interior to the edge");
        int m = add_vertex(std::move(label));
        edges[e] = {old.a, m, t};
        edges.push_back({m, old.b, old.len - t});
        return m;
    }
};

template <class S>
S from_rational(const Rational& q) {
    if constexpr (std::is_same_v<S, Rational>) return q;
    else return S(to_double(q));
}

template <class S>
struct PLFunction {
    MetricGraph graph;
    std::vector<S> values;

    S slope(int e, int from) const {
        const Edge& E = graph.edges[e];
        int to = E.a == from ? E.b : E.a;
        return (values[to] - values[from]) / from_rational<S>(E.len);
    }
    // value at distance t from the a-endpoint of edge e
    S at(int e, const Rational& t) const {
        const Edge& E = graph.edges[e];
        return values[E.a] + (values[E.b] - values[E.a]) * from_rational<S>(t / E.len);
    }
};

template <class S>
struct GraphMeasure {
    std::vector<std::pair<int, S>> atoms;

    S total() const {
        S t = S(0);
        for (auto& a : atoms) t += a.second;
        return t;
    }
    S weight(int v) const {
        S t = S(0);
        for (auto& a : atoms)
            if (a.first == v) t += a.second;
        return t;
    }
    std::optional<S> min_weight() const {
        std::optional<S> m;
        for (auto& a : atoms)
            if (!m || a.second < *m) m = a.second;
        return m;
    }
};

// Sum of outgoing slopes at each vertex (subharmonic iff nonnegative).
template <class S>
GraphMeasure<S> graph_laplacian(const PLFunction<S>& u) {
    if (int(u.values.size()) != u.graph.size()) throw DomainError("PL function misses vertex values");
    std::vector<S> w(u.graph.size(), S(0));
    for (int e = 0; e < int(u.graph.edges.size()); ++e) {
        const Edge& E = u.graph.edges[e];
        S s = (u.values[E.b] - u.values[E.a]) / from_rational<S>(E.len);
        w[E.a] += s;
        w[E.b] -= s;
    }
    GraphMeasure<S> m;
    for (int v = 0; v < u.graph.size(); ++v) m.atoms.push_back({v, w[v]});
    return m;
}

// Sum over vertices of v * (Delta u).
template <class S>
S pair_with_laplacian(const PLFunction<S>& v, const PLFunction<S>& u) {
    auto L = graph_laplacian(u);
    S t = S(0);
    for (auto& [x, w] : L.atoms) t += v.values[x] * w;
    return t;
}

namespace detail {
template <class S>
bool is_zero(const S& x) {
    if constexpr (std::is_same_v<S, Rational>) return x == 0;
    else return std::abs(x) < 1e-300;
}
template <class S>
S magnitude(const S& x) {
    return x < S(0) ? -x : x;
}

// Dense Gaussian elimination with partial pivoting; A is n x n, b length n.
template <class S>
std::vector<S> solve_dense(std::vector<std::vector<S>> A, std::vector<S> b) {
    int n = int(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!is_zero(A[r][col]) && (piv < 0 || magnitude(A[r][col]) > magnitude(A[piv][col]))) piv = r;
        if (piv < 0) throw NumericError("singular linear system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (int r = col + 1; r < n; ++r) {
            if (is_zero(A[r][col])) continue;
            S f = A[r][col] / A[col][col];
            for (int c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<S> x(n, S(0));
    for (int r = n - 1; r >= 0; --r) {
        S s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}
}  // namespace detail

// Harmonic extension of boundary data: Laplacian vanishes at every other vertex.
template <class S>
PLFunction<S> dirichlet_extend(const MetricGraph& g, const std::map<int, S>& boundary_values) {
    if (boundary_values.empty()) throw DomainError("Dirichlet problem needs a nonempty boundary");
    if (!g.connected()) throw DomainError("Dirichlet problem needs a connected graph");
    std::vector<int> index(g.size(), -1);
    std::vector<int> interior;
    for (int v = 0; v < g.size(); ++v)
        if (!boundary_values.count(v)) {
            index[v] = int(interior.size());
            interior.push_back(v);
        }
    for (auto& [v, _] : boundary_values)
        if (v < 0 || v >= g.size()) throw DomainError("boundary vertex out of range");
    int n = int(interior.size());
    std::vector<std::vector<S>> A(n, std::vector<S>(n, S(0)));
    std::vector<S> rhs(n, S(0));
    for (auto& E : g.edges) {
        S w = S(1) / from_rational<S>(E.len);
        for (auto [x, y] : {std::pair{E.a, E.b}, std::pair{E.b, E.a}}) {
            if (index[x] < 0) continue;
            A[index[x]][index[x]] += w;
            if (index[y] >= 0) A[index[x]][index[y]] -= w;
            else rhs[index[x]] += w * boundary_values.at(y);
        }
    }
    std::vector<S> sol = n ? detail::solve_dense(A, rhs) : std::vector<S>{};
    PLFunction<S> u{g, std::vector<S>(g.size(), S(0))};
    for (auto& [v, val] : boundary_values) u.values[v] = val;
    for (int i = 0; i < n; ++i) u.values[interior[i]] = sol[i];
    return u;
}

template <class S>
struct MassReport {
    S mass = S(0);           // positive Laplacian mass on the region interior
    S bound = S(0);          // N (sup_{Y_l} u - inf_Y u) / l
    int outgoing = 0;        // N
    bool subharmonic = true; // Laplacian >= 0 on the interior
    std::vector<int> interior;
};

// Mass of the Laplacian inside a vertex region against the slope bound.
template <class S>
MassReport<S> mass_in(const PLFunction<S>& u, const std::set<int>& region, const Rational& ell) {
    if (ell <= 0) throw DomainError("mass_in needs a positive margin");
    if (region.empty()) throw DomainError("mass_in needs a nonempty region");
    const auto& g = u.graph;
    auto adj = g.adjacency();
    MassReport<S> rep;
    std::set<int> rim;
    for (int v : region)
        for (auto [w, e] : adj.at(v))
            if (!region.count(w)) rim.insert(v);
    for (int v : region)
        if (!rim.count(v)) rep.interior.push_back(v);
    auto L = graph_laplacian(u);
    for (int v : rep.interior) {
        S w = L.weight(v);
        if (w < S(0)) rep.subharmonic = false;
        else rep.mass += w;
    }
    S sup = u.values[*region.begin()], inf = sup;
    for (int v : region) {
        sup = std::max(sup, u.values[v]);
        inf = std::min(inf, u.values[v]);
    }
    for (int v : region)
        for (auto [w, e] : adj[v]) {
            if (region.count(w)) continue;
            if (ell > g.edges[e].len) throw DomainError("margin exceeds an outgoing edge length");
            ++rep.outgoing;
            S reach = u.values[v] + u.slope(e, v) * from_rational<S>(ell);
            sup = std::max(sup, reach);
        }
    rep.bound = S(rep.outgoing) * (sup - inf) / from_rational<S>(ell);
    return rep;
}

}  // namespace hybrid
