#pragma once
// Family sweeps over grids of places: chi_{c,rho} and equilibrium measures.

#include "io.hpp"

#include <future>
#include <map>
#include <ostream>

namespace hybrid {

struct SweepConfig {
    std::string base = "hybrid";  // hybrid | arch | padic
    unsigned long p = 0;
    std::vector<Place> grid;
    std::optional<HomogeneousLift> map;
    std::vector<AffableFn> functions;
    Rational center = 0;
    Rational logr_a = 0, logr_b = 0;  // log-radius a + b*eps, in place units
    int n = -1;                        // preimage depth; -1 picks from tol
    int quad_n = 256;
    double tol = 1e-9;
    BerkPoint seed = BerkPoint::classical(Rational(2));
    std::vector<BerkPoint> skeleton;   // ultrametric rows; Gauss is always added
    std::string output;
};

// eps in {1, 1/2, ..., 2^-10} then the trivially valued endpoint; p-adic: eps in
// {2^-4, ..., 2^6} then the residue endpoint.
inline std::vector<Place> default_grid(const std::string& base, unsigned long p = 0) {
    std::vector<Place> g;
    if (base == "padic") {
        for (int k = -4; k <= 6; ++k) g.push_back(Place::padic(p, k < 0 ? rat(1, 1LL << -k) : rat(1LL << k)));
        g.push_back(Place::residue(p));
        return g;
    }
    for (int k = 0; k <= 10; ++k) g.push_back(Place::arch(rat(1, 1LL << k)));
    if (base == "hybrid") g.push_back(Place::trivial());
    return g;
}

struct SweepRow {
    Place place;
    std::string fn_id;
    double value = 0;
    double cert_err = 0;
    int n_used = 0;
    std::string error;  // empty when the row succeeded
};

struct SweepTable {
    std::vector<SweepRow> rows;
    // per function: |v_{i+1} - v_i| along the grid, in grid order
    std::map<std::string, std::vector<double>> modulus;
    std::vector<std::string> warnings;

    const SweepRow& row(std::size_t place_index, const std::string& fn) const {
        for (auto& r : rows)
            if (r.fn_id == fn && place_index-- == 0) return r;
        throw DomainError("no such sweep row");
    }
};

inline void fill_modulus(SweepTable& T) {
    std::map<std::string, std::vector<double>> vals;
    for (auto& r : T.rows) vals[r.fn_id].push_back(r.value);
    for (auto& [id, v] : vals) {
        std::vector<double> d;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) d.push_back(std::fabs(v[i + 1] - v[i]));
        T.modulus[id] = d;
    }
}

inline void check_config(const SweepConfig& c) {
    if (c.grid.empty()) throw DomainError("sweep grid is empty");
    if (c.functions.empty()) throw DomainError("sweep needs at least one test function");
    for (std::size_t i = 0; i + 1 < c.grid.size(); ++i)
        if (c.grid[i].kind == PlaceKind::Trivial || c.grid[i].kind == PlaceKind::Residue)
            throw DomainError("the ultrametric endpoint must come last in the grid");
}

// Runs one task per place concurrently and merges rows in grid order.
template <class RowFn>
SweepTable run_rows(const SweepConfig& c, RowFn&& per_place) {
    std::vector<std::future<std::vector<SweepRow>>> jobs;
    for (auto& y : c.grid) jobs.push_back(std::async(std::launch::async, [&, y] { return per_place(y); }));
    SweepTable T;
    for (auto& j : jobs) {
        auto rows = j.get();
        T.rows.insert(T.rows.end(), rows.begin(), rows.end());
    }
    fill_modulus(T);
    return T;
}

inline Rational radius_at(const SweepConfig& c, const Place& y) {
    if (y.kind == PlaceKind::Trivial || y.kind == PlaceKind::Residue) return c.logr_a;
    return c.logr_a + c.logr_b * y.eps;
}

inline SweepTable sweep_chi(const SweepConfig& c) {
    check_config(c);
    return run_rows(c, [&](const Place& y) {
        std::vector<SweepRow> rows;
        Measure mu;
        std::string err;
        try {
            mu = chi(y, c.center, radius_at(c, y));
        } catch (const std::exception& e) {
            err = e.what();
        }
        for (auto& f : c.functions) {
            SweepRow r{y, f.id, 0, 0, 0, {}};
            if (!err.empty()) {
                r.error = err;
                r.value = r.cert_err = std::nan("");
            } else {
                try {
                    Integral I = integrate(y, mu, as_point_fn(y, f), c.quad_n);
                    r.value = I.value;
                    r.cert_err = I.err;
                    r.n_used = I.quad_used;
                } catch (const std::exception& e) {
                    r.error = e.what();
                    r.value = r.cert_err = std::nan("");
                }
            }
            rows.push_back(r);
        }
        return rows;
    });
}

inline int depth_for(const SweepConfig& c, int d) {
    if (c.n >= 0) return c.n;
    // atom spacing ~ d^{-n}; aim for tol without exceeding desk-scale atom counts
    int n = 1;
    while (std::pow(double(d), -n) > c.tol && std::pow(double(d), n + 1) <= 70000) ++n;
    return n;
}

inline SweepTable sweep_equilibrium(const SweepConfig& c) {
    check_config(c);
    if (!c.map) throw DomainError("equilibrium sweep needs a map");
    const HomogeneousLift& F = *c.map;
    int n = depth_for(c, F.d);
    // the preimage measures do not depend on eps: build them once
    std::optional<ArchEquilibrium> En;
    std::vector<std::string> warnings;
    bool any_arch = false;
    for (auto& y : c.grid) any_arch = any_arch || y.archimedean();
    if (any_arch) {
        Place y1 = Place::arch(1);
        En = equilibrium_arch(y1, F, c.seed, n);
        if (En->exceptional_warning) warnings.push_back("seed looks exceptional: preimage tree collapses");
        if (En->ill_conditioned) warnings.push_back("preimage roots nearly collide; multiplicities may be off");
    }
    std::vector<BerkPoint> skel_pts = c.skeleton;
    skel_pts.push_back(BerkPoint::gauss());
    SweepTable T = run_rows(c, [&](const Place& y) {
        std::vector<SweepRow> rows;
        if (y.archimedean()) {
            for (auto& f : c.functions) {
                SweepRow r{y, f.id, 0, 0, 0, {}};
                try {
                    auto fn = as_point_fn(y, f);
                    double a = integrate(y, En->mu, fn).value, b = integrate(y, En->prev, fn).value;
                    r.value = a;
                    r.cert_err = std::fabs(a - b) / (F.d - 1);
                    r.n_used = n;
                } catch (const std::exception& e) {
                    r.error = e.what();
                    r.value = r.cert_err = std::nan("");
                }
                rows.push_back(r);
            }
            return rows;
        }
        std::string err;
        NonarchEquilibrium E;
        try {
            E = equilibrium_nonarch(y, F, build_skeleton(y, skel_pts), 1e-12);
        } catch (const std::exception& e) {
            err = e.what();
        }
        for (auto& f : c.functions) {
            SweepRow r{y, f.id, 0, 0, 0, {}};
            if (!err.empty()) {
                r.error = err;
                r.value = r.cert_err = std::nan("");
                rows.push_back(r);
                continue;
            }
            try {
                r.value = integrate(y, E.mu, as_point_fn(y, f)).value;
                r.cert_err = E.exact ? 0.0 : E.lambda_err * mass_bound(y, f).total;
                int nu = 0;
                for (auto& P : E.potentials) nu = std::max(nu, P.n_used);
                r.n_used = nu;
            } catch (const std::exception& e) {
                r.error = e.what();
                r.value = r.cert_err = std::nan("");
            }
            rows.push_back(r);
        }
        return rows;
    });
    T.warnings = warnings;
    return T;
}

inline void write_table_csv(std::ostream& os, const SweepTable& T) {
    os << "place_kind,place_param,fn_id,value,cert_err,n_used\n";
    for (auto& r : T.rows)
        os << kind_name(r.place) << "," << param_string(r.place) << "," << r.fn_id << "," << fmt(r.value) << ","
           << fmt(r.cert_err) << "," << r.n_used << "\n";
}

inline json table_to_json(const SweepTable& T) {
    json j{{"rows", json::array()}, {"modulus", json::object()}, {"warnings", T.warnings}};
    for (auto& r : T.rows) {
        json row{{"place_kind", kind_name(r.place)}, {"place_param", param_string(r.place)}, {"fn_id", r.fn_id},
                 {"value", r.error.empty() ? json(r.value) : json(nullptr)},
                 {"cert_err", r.error.empty() ? json(r.cert_err) : json(nullptr)}, {"n_used", r.n_used}};
        if (!r.error.empty()) row["error"] = r.error;
        j["rows"].push_back(row);
    }
    for (auto& [id, m] : T.modulus) j["modulus"][id] = m;
    return j;
}

inline SweepConfig config_from_json(const json& j, const std::string& base_dir = ".") {
    try {
        SweepConfig c;
        if (j.contains("base")) {
            const json& b = j.at("base");
            if (b.is_string()) c.base = b.get<std::string>();
            else {
                c.base = "padic";
                c.p = b.at("padic").get<unsigned long>();
            }
        }
        if (c.base != "hybrid" && c.base != "arch" && c.base != "padic") throw DomainError("unknown base '" + c.base + "'");
        if (c.base == "padic" && !is_prime(c.p)) throw DomainError("p-adic base needs a prime");
        if (j.contains("grid")) {
            for (auto& y : j.at("grid")) c.grid.push_back(place_from_json(y));
        } else {
            c.grid = default_grid(c.base, c.p);
        }
        std::optional<Rational> t;
        if (j.contains("t")) t = rational_of(j.at("t"));
        if (j.contains("map")) c.map = map_from_json(j.at("map").is_string() ? read_json_file(base_dir + "/" + j.at("map").get<std::string>()) : j.at("map"), t);
        if (j.contains("functions")) {
            const json& f = j.at("functions");
            if (f.is_string()) {
                std::string path = f.get<std::string>();
                if (!path.empty() && path[0] != '/') path = base_dir + "/" + path;
                c.functions = battery_from_json(read_json_file(path));
            } else {
                c.functions = battery_from_json(f);
            }
        }
        if (j.contains("fn_ids")) {
            std::vector<AffableFn> keep;
            for (auto& id : j.at("fn_ids"))
                for (auto& f : c.functions)
                    if (f.id == id.get<std::string>()) keep.push_back(f);
            if (keep.empty()) throw DomainError("fn_ids selects no function");
            c.functions = keep;
        }
        if (j.contains("center")) c.center = rational_of(j.at("center"));
        if (j.contains("logr")) {
            const json& l = j.at("logr");
            if (l.is_object()) {
                c.logr_a = rational_of(l.value("a", json("0")));
                c.logr_b = rational_of(l.value("b", json("0")));
            } else {
                c.logr_a = rational_of(l);
            }
        }
        c.n = j.value("n", -1);
        c.quad_n = j.value("quad_n", 256);
        c.tol = j.value("tol", 1e-9);
        if (c.tol <= 0) throw DomainError("tolerance must be positive");
        if (j.contains("seed")) {
            const json& s = j.at("seed");
            c.seed = s.is_object() ? point_from_json(s) : BerkPoint::classical(parse_complex(s.get<std::string>()));
        }
        if (j.contains("skeleton")) c.skeleton = points_from_json(j.at("skeleton"));
        c.output = j.value("output", std::string());
        return c;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed sweep config: ") + e.what());
    }
}

}  // namespace hybrid
