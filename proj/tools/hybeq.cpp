// hybeq: Green potentials, equilibrium measures and hybrid sweeps from the command line.
#include "hybrid/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>

using namespace hybrid;

namespace {

struct Globals {
    std::string config;
    std::string out = "csv";
    unsigned long long seed = 1;
    bool quiet = false;
};

struct Out {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Out(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw DomainError("cannot write '" + path + "'");
            os = &file;
        }
    }
};

void note(const Globals& g, const std::string& s) {
    if (!g.quiet) std::cerr << s << "\n";
}

json config_or_empty(const Globals& g) { return g.config.empty() ? json::object() : read_json_file(g.config); }

std::string dir_of(const std::string& path) {
    auto k = path.find_last_of('/');
    return k == std::string::npos ? "." : path.substr(0, k);
}

// Option value, else config key, else error.
std::string pick(const std::string& opt, const json& cfg, const char* key) {
    if (!opt.empty()) return opt;
    if (cfg.contains(key)) return cfg.at(key).is_string() ? cfg.at(key).get<std::string>() : cfg.at(key).dump();
    throw DomainError(std::string("missing --") + key);
}

int run_green(const Globals& g, const std::string& map_s, const std::string& place_s, const std::string& pts_s, double tol) {
    json cfg = config_or_empty(g);
    HomogeneousLift F = map_from_json(json_arg(pick(map_s, cfg, "map")));
    Place y = place_from_json(json_arg(pick(place_s, cfg, "place")));
    auto pts = points_from_json(json_arg(pick(pts_s, cfg, "points")));
    GmaxCert G = gmax_certified(y, F);
    note(g, "G_max = " + fmt(G.value) + " (" + to_string(G.kind) + ")");
    json rows = json::array();
    std::ostringstream csv;
    csv << "point_id,lambda,n_used,certified_error\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Potential P = lambda_limit(y, F, pts[i], tol, &G);
        csv << i << "," << fmt(P.value) << "," << P.n_used << "," << fmt(P.cert_err) << "\n";
        json r{{"point_id", i}, {"lambda", P.value}, {"n_used", P.n_used}, {"certified_error", P.cert_err}, {"method", P.method}};
        if (P.exact) r["lambda_units"] = to_string(P.units);
        rows.push_back(r);
    }
    if (g.out == "json") std::cout << rows.dump(2) << "\n";
    else std::cout << csv.str();
    return 0;
}

int run_equilibrium(const Globals& g, const std::string& map_s, const std::string& place_s, const std::string& mode,
                    int n, const std::string& seed_s, const std::string& skel_s) {
    json cfg = config_or_empty(g);
    HomogeneousLift F = map_from_json(json_arg(pick(map_s, cfg, "map")));
    Place y = place_from_json(json_arg(pick(place_s, cfg, "place")));
    Measure mu;
    if (mode == "arch") {
        BerkPoint seed = BerkPoint::classical(parse_complex(seed_s.empty() ? "2" : seed_s));
        auto E = equilibrium_arch(y, F, seed, n);
        if (E.exceptional_warning) note(g, "warning: seed looks exceptional (preimage tree collapses)");
        if (E.ill_conditioned) note(g, "warning: nearly colliding preimages");
        mu = E.mu;
    } else if (mode == "nonarch") {
        std::vector<BerkPoint> pts{BerkPoint::gauss()};
        if (!skel_s.empty() || cfg.contains("skeleton")) {
            auto extra = points_from_json(json_arg(pick(skel_s, cfg, "skeleton")));
            pts.insert(pts.end(), extra.begin(), extra.end());
        }
        auto E = equilibrium_nonarch(y, F, build_skeleton(y, pts));
        note(g, "total mass " + to_string(E.total) + ", min atom " + to_string(E.min_weight) + (E.exact ? ", exact" : ", truncated"));
        if (E.min_weight < 0) note(g, "warning: negative atoms, refine the skeleton");
        mu = E.mu;
    } else {
        throw DomainError("--mode must be arch or nonarch");
    }
    if (g.out == "json") std::cout << measure_to_json(mu).dump(2) << "\n";
    else write_measure_csv(std::cout, mu);
    return 0;
}

int run_sweep(const Globals& g, bool equilibrium) {
    if (g.config.empty()) throw DomainError("sweeps need --config");
    SweepConfig c = config_from_json(read_json_file(g.config), dir_of(g.config));
    SweepTable T = equilibrium ? sweep_equilibrium(c) : sweep_chi(c);
    for (auto& w : T.warnings) note(g, "warning: " + w);
    bool failed = false;
    for (auto& r : T.rows)
        if (!r.error.empty()) {
            failed = true;
            note(g, "row " + describe(r.place) + " / " + r.fn_id + " failed: " + r.error);
        }
    for (auto& [id, m] : T.modulus) {
        std::string s = "modulus " + id + ":";
        for (double v : m) s += " " + fmt(v);
        note(g, s);
    }
    Out o(c.output);
    if (g.out == "json") *o.os << table_to_json(T).dump(2) << "\n";
    else write_table_csv(*o.os, T);
    return failed ? 3 : 0;
}

int run_contraction(const Globals& g, const std::string& map_s, const std::string& place_s, int N, double radius,
                    int count, const std::string& pts_s) {
    json cfg = config_or_empty(g);
    HomogeneousLift F = map_from_json(json_arg(pick(map_s, cfg, "map")));
    Place y = place_from_json(json_arg(pick(place_s, cfg, "place")));
    std::vector<BerkPoint> K;
    if (!pts_s.empty()) K = points_from_json(json_arg(pts_s));
    else if (y.archimedean()) K = circle_sample(0, radius, count);
    else
        for (int k = 0; k < count; ++k) K.push_back(BerkPoint::classical(Rational(k)));  // residues on the unit sphere
    auto R = report_contraction(y, F, K, N);
    note(g, "G_max = " + fmt(R.gmax.value) + " (" + to_string(R.gmax.kind) + "), certified error at n=" +
                std::to_string(R.n_cert) + ": " + fmt(R.cert_err));
    if (g.out == "json") {
        json j = json::array();
        for (auto& r : R.rows)
            j.push_back({{"n", r.n}, {"dk_next", r.dk_next}, {"dk_prev", r.dk_prev}, {"ratio", r.ratio},
                         {"exact_zero", r.exact_zero}, {"image_ratio", r.image_ratio}});
        std::cout << json{{"rows", j}, {"gmax", R.gmax.value}, {"cert_err", R.cert_err}}.dump(2) << "\n";
    } else {
        std::cout << "n,dk_next,dk_prev,ratio,exact_zero,image_ratio\n";
        for (auto& r : R.rows)
            std::cout << r.n << "," << fmt(r.dk_next) << "," << fmt(r.dk_prev) << "," << (r.exact_zero ? "exact-0" : fmt(r.ratio))
                      << "," << (r.exact_zero ? 1 : 0) << "," << fmt(r.image_ratio) << "\n";
    }
    return 0;
}

std::vector<Rational> values_of(const json& j) {
    std::vector<Rational> v;
    for (auto& x : j) v.push_back(rational_of(x));
    return v;
}

int run_graph(const Globals& g, const std::string& action, const std::string& graph_s, const std::string& values_s,
              const std::string& place_s, const std::string& pts_s) {
    json cfg = config_or_empty(g);
    if (action == "skeleton") {
        Place y = place_from_json(json_arg(pick(place_s, cfg, "place")));
        auto G = build_skeleton(y, points_from_json(json_arg(pick(pts_s, cfg, "points"))));
        std::cout << to_json(G).dump(2) << "\n";
        return 0;
    }
    MetricGraph G = graph_from_json(json_arg(pick(graph_s, cfg, "graph")));
    json vj = json_arg(pick(values_s, cfg, "values"));
    if (action == "laplacian") {
        auto v = values_of(vj);
        if (int(v.size()) != G.size()) throw DomainError("one value per vertex expected");
        auto L = graph_laplacian(PLFunction<Rational>{G, v});
        std::cout << "vertex_id,weight\n";
        for (auto& [x, w] : L.atoms) std::cout << x << "," << to_string(w) << "\n";
        return 0;
    }
    if (action == "dirichlet") {
        // values: {"vertex": value} or one value per boundary vertex
        std::map<int, Rational> bv;
        if (vj.is_object())
            for (auto& [k, val] : vj.items()) bv[std::stoi(k)] = rational_of(val);
        else {
            auto v = values_of(vj);
            if (v.size() != G.boundary.size()) throw DomainError("one value per boundary vertex expected");
            for (std::size_t i = 0; i < v.size(); ++i) bv[G.boundary[i]] = v[i];
        }
        auto u = dirichlet_extend(G, bv);
        std::cout << "vertex_id,value\n";
        for (int x = 0; x < G.size(); ++x) std::cout << x << "," << to_string(u.values[x]) << "\n";
        return 0;
    }
    throw DomainError("graph action must be laplacian, dirichlet or skeleton");
}

int run_pairing(const Globals& g, const std::string& map_s, const std::string& map2_s, const std::string& place_s, int n,
                const std::string& seed_s, const std::string& tvals) {
    json cfg = config_or_empty(g);
    json mj = json_arg(pick(map_s, cfg, "map")), m2j = json_arg(pick(map2_s, cfg, "map2"));
    Place y = place_from_json(json_arg(pick(place_s, cfg, "place")));
    PairingParams prm;
    prm.n = n;
    prm.seed = BerkPoint::classical(parse_complex(seed_s.empty() ? "2" : seed_s));
    if (y.ultrametric()) {
        std::vector<BerkPoint> pts{BerkPoint::gauss()};
        if (cfg.contains("skeleton")) {
            auto extra = points_from_json(cfg.at("skeleton"));
            pts.insert(pts.end(), extra.begin(), extra.end());
        }
        prm.skeleton = build_skeleton(y, pts);
    }
    std::vector<std::optional<Rational>> ts;
    if (tvals.empty()) ts.push_back(std::nullopt);
    else {
        std::stringstream ss(tvals);
        std::string item;
        while (std::getline(ss, item, ',')) ts.push_back(parse_rational(item));
    }
    json rows = json::array();
    std::cout << (g.out == "json" ? "" : "t,pairing\n");
    for (auto& t : ts) {
        auto F = map_from_json(mj, t), G2 = map_from_json(m2j, t);
        double v = energy_pairing(y, F, G2, prm);
        if (g.out == "json") rows.push_back({{"t", t ? to_string(*t) : "-"}, {"pairing", v}});
        else std::cout << (t ? to_string(*t) : "-") << "," << fmt(v) << "\n";
    }
    if (g.out == "json") std::cout << rows.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybeq: equilibrium measures of rational maps over hybrid base spectra"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "JSON config file");
    app.add_option("--out", g.out, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "u64 seed for sampled probes");
    app.add_flag("--quiet", g.quiet, "suppress diagnostics on stderr");

    std::string map_s, map2_s, place_s, pts_s, mode = "arch", cseed, skel_s, graph_s, values_s, tvals;
    double tol = 1e-8, radius = 1;
    int n = 14, N = 12, count = 64;

    auto* green = app.add_subcommand("green", "lambda_phi with certified error at points");
    green->add_option("--map", map_s);
    green->add_option("--place", place_s);
    green->add_option("--points", pts_s);
    green->add_option("--tol", tol);

    auto* eq = app.add_subcommand("equilibrium", "equilibrium measure in one fiber");
    eq->add_option("--map", map_s);
    eq->add_option("--place", place_s);
    eq->add_option("--mode", mode)->check(CLI::IsMember({"arch", "nonarch"}));
    eq->add_option("--n", n);
    eq->add_option("--seed", cseed, "complex seed, e.g. 2+0i");
    eq->add_option("--skeleton", skel_s);

    auto* schi = app.add_subcommand("sweep-chi", "sweep chi_{c,rho} over a grid of places");
    auto* seq = app.add_subcommand("sweep-eq", "sweep equilibrium measures over a grid of places");

    auto* con = app.add_subcommand("contraction", "ecart ratios of the potential iteration");
    con->add_option("--map", map_s);
    con->add_option("--place", place_s);
    con->add_option("--n", N);
    con->add_option("--radius", radius);
    con->add_option("--count", count);
    con->add_option("--points", pts_s);

    auto* gr = app.add_subcommand("graph", "metric-graph utilities");
    std::string action;
    gr->add_option("action", action, "laplacian | dirichlet | skeleton")->required();
    gr->add_option("--graph", graph_s);
    gr->add_option("--values", values_s);
    gr->add_option("--place", place_s);
    gr->add_option("--points", pts_s);

    auto* pr = app.add_subcommand("pairing", "energy pairing of two equilibrium measures");
    pr->add_option("--map", map_s);
    pr->add_option("--map2", map2_s);
    pr->add_option("--place", place_s);
    pr->add_option("--n", n);
    pr->add_option("--seed", cseed);
    pr->add_option("--t-values", tvals, "comma-separated values of the family parameter t");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    try {
        if (*green) return run_green(g, map_s, place_s, pts_s, tol);
        if (*eq) return run_equilibrium(g, map_s, place_s, mode, n, cseed, skel_s);
        if (*schi) return run_sweep(g, false);
        if (*seq) return run_sweep(g, true);
        if (*con) return run_contraction(g, map_s, place_s, N, radius, count, pts_s);
        if (*gr) return run_graph(g, action, graph_s, values_s, place_s, pts_s);
        if (*pr) return run_pairing(g, map_s, map2_s, place_s, n, cseed, tvals);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
