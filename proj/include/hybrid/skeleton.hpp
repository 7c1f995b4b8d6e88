#pragma once
// Convex hulls of disk points in the ultrametric line and the retraction onto them.

#include "metric_graph.hpp"

namespace hybrid {

// Vertex v's parent is the smallest other vertex whose disk contains it; -1 at the root.
inline std::vector<int> skeleton_parents(const Place& y, const MetricGraph& g) {
    std::vector<int> parent(g.size(), -1);
    for (int v = 0; v < g.size(); ++v) {
        const BerkPoint& x = *g.labels[v];
        for (int w = 0; w < g.size(); ++w) {
            if (w == v) continue;
            const BerkPoint& D = *g.labels[w];
            if (D.logr <= x.logr || !in_disk(y, x, D)) continue;
            if (parent[v] < 0 || D.logr < g.labels[parent[v]]->logr) parent[v] = w;
        }
    }
    return parent;
}

inline MetricGraph build_skeleton(const Place& y, const std::vector<BerkPoint>& pts) {
    if (y.archimedean()) throw DomainError("skeletons live in ultrametric fibers");
    if (pts.empty()) throw DomainError("skeleton needs at least one point");
    std::vector<BerkPoint> all;
    auto push = [&](const BerkPoint& x) {
        for (auto& w : all)
            if (same_point(y, x, w)) return;
        all.push_back(canonical(y, x));
    };
    for (auto& x : pts) {
        if (!x.is_disk()) throw DomainError("skeleton vertices must be disk points");
        push(x);
    }
    std::size_t n0 = all.size();
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = i + 1; j < n0; ++j) push(join(y, all[i], all[j]));
    // order by radius so vertex ids are stable and children come first
    std::stable_sort(all.begin(), all.end(), [](const BerkPoint& a, const BerkPoint& b) { return a.logr < b.logr; });
    MetricGraph g;
    for (auto& x : all) g.add_vertex(x);
    auto parent = skeleton_parents(y, g);
    for (int v = 0; v < g.size(); ++v)
        if (parent[v] >= 0) g.add_edge(v, parent[v], g.labels[parent[v]]->logr - g.labels[v]->logr);
    g.boundary = g.leaves();
    return g;
}

struct Location {
    int vertex = -1;      // set when the retraction is a vertex
    int edge = -1;        // otherwise the edge (child a, parent b)
    Rational offset;      // distance from the edge's a-endpoint
    BerkPoint point;      // the retraction as a disk point
};

// Nearest point of the skeleton tree; edges must run child -> parent as built above.
inline Location retract(const Place& y, const BerkPoint& x, const MetricGraph& g) {
    if (y.archimedean()) throw DomainError("retraction lives in ultrametric fibers");
    check_fiber(y, x);
    int root = -1, best = -1;
    for (int v = 0; v < g.size(); ++v) {
        const BerkPoint& D = *g.labels.at(v);
        if (root < 0 || D.logr > g.labels[root]->logr) root = v;
        if (in_disk(y, x, D) && (best < 0 || D.logr < g.labels[best]->logr)) best = v;
    }
    Location loc;
    if (best < 0) {
        loc.vertex = root;
        loc.point = *g.labels[root];
        return loc;
    }
    const BerkPoint& W = *g.labels[best];
    for (int e = 0; e < int(g.edges.size()); ++e) {
        const Edge& E = g.edges[e];
        if (E.b != best) continue;
        const BerkPoint& C = *g.labels[E.a];
        BerkPoint m = x.is_disk() || x.is_classical() ? join(y, x, C) : C;
        if (m.logr < W.logr) {
            if (m.logr == C.logr) {
                loc.vertex = E.a;
                loc.point = C;
            } else {
                loc.edge = e;
                loc.offset = m.logr - C.logr;
                loc.point = canonical(y, BerkPoint::disk(C.center(), m.logr));
            }
            return loc;
        }
    }
    loc.vertex = best;
    loc.point = W;
    return loc;
}

// Index of the vertex carrying a given point, or -1.
inline int find_vertex(const Place& y, const MetricGraph& g, const BerkPoint& x) {
    for (int v = 0; v < g.size(); ++v)
        if (g.labels[v] && same_point(y, *g.labels[v], x)) return v;
    return -1;
}

}  // namespace hybrid
