#pragma once
// JSON and CSV formats for places, points, maps, graphs, affable functions and measures.

#include "affable.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace hybrid {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DomainError("malformed JSON in '" + path + "': " + e.what());
    }
}

// Inline JSON text, or a path to a JSON file.
inline json json_arg(const std::string& s) {
    auto first = s.find_first_not_of(" \t\n");
    if (first != std::string::npos && (s[first] == '{' || s[first] == '[')) {
        try {
            return json::parse(s);
        } catch (const json::exception& e) {
            throw DomainError(std::string("malformed inline JSON: ") + e.what());
        }
    }
    return read_json_file(s);
}

inline Rational rational_of(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return snap(j.get<double>());
    throw DomainError("expected a rational, got " + j.dump());
}

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// ---- Place ----

inline Place place_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw DomainError("place needs a 'kind'");
    std::string k = j.at("kind").get<std::string>();
    auto eps = [&]() { return j.contains("eps") ? rational_of(j.at("eps")) : Rational(1); };
    if (k == "arch") return Place::arch(eps());
    if (k == "padic") return Place::padic(j.at("p").get<unsigned long>(), eps());
    if (k == "tadic") return Place::tadic(eps(), j.value("field", std::string("Q")));
    if (k == "trivial") return Place::trivial();
    if (k == "res") return Place::residue(j.at("p").get<unsigned long>());
    throw DomainError("unknown place kind '" + k + "'");
}

inline json to_json(const Place& y) {
    json j{{"kind", kind_name(y)}};
    if (y.kind == PlaceKind::Arch || y.kind == PlaceKind::Padic || y.kind == PlaceKind::TAdic) j["eps"] = to_string(y.eps);
    if (y.kind == PlaceKind::Padic || y.kind == PlaceKind::Residue) j["p"] = y.p;
    if (y.kind == PlaceKind::TAdic) j["field"] = y.tag;
    return j;
}

// ---- BerkPoint ----

// "2+0i", "-1.5-2i", "3"
inline cplx parse_complex(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != ' ') t += c;
    if (t.empty()) throw DomainError("empty complex literal");
    try {
        if (t.back() != 'i') return {std::stod(t), 0.0};
        std::string body = t.substr(0, t.size() - 1);
        std::size_t cut = std::string::npos;
        for (std::size_t i = 1; i < body.size(); ++i)
            if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') cut = i;
        if (cut == std::string::npos) {
            if (body.empty() || body == "+") return {0, 1};
            if (body == "-") return {0, -1};
            return {0, std::stod(body)};
        }
        std::string im = body.substr(cut);
        double iv = (im == "+") ? 1 : (im == "-") ? -1 : std::stod(im);
        return {std::stod(body.substr(0, cut)), iv};
    } catch (const std::exception&) {
        throw DomainError("malformed complex literal '" + s + "'");
    }
}

inline BerkPoint point_from_json(const json& j) {
    if (!j.is_object() || !j.contains("t")) throw DomainError("point needs a 't' field");
    std::string t = j.at("t").get<std::string>();
    if (t == "inf") return BerkPoint::infinity();
    if (t == "disk") return BerkPoint::disk(rational_of(j.at("center")), rational_of(j.value("logr", json("0"))));
    if (t == "cls") {
        const json& re = j.at("re");
        double im = 0;
        if (j.contains("im")) im = j.at("im").is_number() ? j.at("im").get<double>() : to_double(rational_of(j.at("im")));
        if (im == 0) {
            if (re.is_string() || re.is_number_integer()) return BerkPoint::classical(rational_of(re));
            double x = re.get<double>();
            Rational q = snap(x);
            if (to_double(q) == x) return BerkPoint::classical(q);
            return BerkPoint::classical(cplx(x, 0));
        }
        double x = re.is_string() ? to_double(rational_of(re)) : re.get<double>();
        return BerkPoint::classical(cplx(x, im));
    }
    throw DomainError("unknown point type '" + t + "'");
}

inline json to_json(const BerkPoint& x) {
    switch (x.kind) {
        case BerkPoint::Kind::Infinity: return json{{"t", "inf"}};
        case BerkPoint::Kind::Disk: return json{{"t", "disk"}, {"center", to_string(*x.a)}, {"logr", to_string(x.logr)}};
        case BerkPoint::Kind::Classical:
            if (x.a) return json{{"t", "cls"}, {"re", to_string(*x.a)}, {"im", 0}};
            return json{{"t", "cls"}, {"re", x.z.real()}, {"im", x.z.imag()}};
    }
    return {};
}

inline std::vector<BerkPoint> points_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("points") ? j.at("points") : j;
    if (!arr.is_array()) throw DomainError("expected an array of points");
    std::vector<BerkPoint> out;
    for (auto& e : arr) out.push_back(point_from_json(e));
    return out;
}

// ---- maps ----

// Coefficient literal: rational, or q*t^k in the family parameter t.
inline Rational coefficient_of(const json& j, const std::optional<Rational>& t) {
    if (!j.is_string()) return rational_of(j);
    std::string s;
    for (char c : j.get<std::string>())
        if (c != ' ') s += c;
    auto tp = s.find('t');
    if (tp == std::string::npos) return parse_rational(s);
    if (!t) throw DomainError("coefficient '" + s + "' uses the family parameter t but none was given");
    Rational q = 1;
    std::string head = s.substr(0, tp);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (head == "-") q = -1;
    else if (!head.empty()) q = parse_rational(head);
    long long k = 1;
    std::string tail = s.substr(tp + 1);
    if (!tail.empty()) {
        if (tail[0] != '^') throw DomainError("malformed coefficient '" + s + "'");
        k = std::stoll(tail.substr(1));
    }
    return q * rpow(*t, k);
}

inline HomogeneousLift map_from_json(const json& j, const std::optional<Rational>& t = std::nullopt) {
    try {
        int d = j.at("d").get<int>();
        if (d < 2) throw DomainError("map degree must be at least 2");
        bool cx = false;
        for (auto key : {"F0", "F1"})
            for (auto& term : j.at(key))
                if (term.at(0).is_object()) cx = true;
        std::vector<Rational> r[2];
        std::vector<cplx> c[2];
        for (int i = 0; i < 2; ++i) {
            r[i].assign(d + 1, Rational(0));
            c[i].assign(d + 1, cplx(0));
            for (auto& term : j.at(i == 0 ? "F0" : "F1")) {
                std::string ex = term.at(1).get<std::string>();
                auto comma = ex.find(',');
                if (comma == std::string::npos) throw DomainError("exponent pair must read 'a,b'");
                int a = std::stoi(ex.substr(0, comma)), b = std::stoi(ex.substr(comma + 1));
                if (a < 0 || b < 0 || a + b != d) throw DomainError("monomial " + ex + " is not of degree " + std::to_string(d));
                if (term.at(0).is_object()) {
                    c[i][a] += cplx(term.at(0).value("re", 0.0), term.at(0).value("im", 0.0));
                } else {
                    Rational q = coefficient_of(term.at(0), t);
                    r[i][a] += q;
                    c[i][a] += cplx(to_double(q), 0);
                }
            }
        }
        if (cx) return make_lift(d, CPoly(c[0]), CPoly(c[1]));
        return make_lift(d, Poly(r[0]), Poly(r[1]));
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed map: ") + e.what());
    }
}

inline json to_json(const HomogeneousLift& F) {
    json j{{"d", F.d}};
    for (int i = 0; i < 2; ++i) {
        json arr = json::array();
        for (int a = F.d; a >= 0; --a) {
            std::string ex = std::to_string(a) + "," + std::to_string(F.d - a);
            if (F.complex_coeffs) {
                cplx v = (i == 0 ? F.c0 : F.c1).coeff(a);
                if (v != cplx(0)) arr.push_back(json::array({json{{"re", v.real()}, {"im", v.imag()}}, ex}));
            } else {
                Rational v = (i == 0 ? F.f0 : F.f1).coeff(a);
                if (v != 0) arr.push_back(json::array({to_string(v), ex}));
            }
        }
        j[i == 0 ? "F0" : "F1"] = arr;
    }
    return j;
}

// ---- graphs ----

inline MetricGraph graph_from_json(const json& j) {
    try {
        MetricGraph g;
        for (auto& v : j.at("vertices")) {
            if (v.is_object() && v.contains("t")) g.add_vertex(point_from_json(v));
            else g.add_vertex();
        }
        for (auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>(), rational_of(e.at(2)));
        if (j.contains("boundary"))
            for (auto& b : j.at("boundary")) {
                int v = b.get<int>();
                if (v < 0 || v >= g.size()) throw DomainError("boundary vertex out of range");
                g.boundary.push_back(v);
            }
        return g;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed graph: ") + e.what());
    }
}

inline json to_json(const MetricGraph& g) {
    json j{{"vertices", json::array()}, {"edges", json::array()}, {"boundary", g.boundary}};
    for (auto& l : g.labels) j["vertices"].push_back(l ? to_json(*l) : json(nullptr));
    for (auto& e : g.edges) j["edges"].push_back(json::array({e.a, e.b, to_string(e.len)}));
    return j;
}

// ---- affable functions ----

inline Poly poly_from_json(const json& j) {
    if (!j.is_array()) throw DomainError("polynomial must be a coefficient array, low degree first");
    std::vector<Rational> c;
    for (auto& x : j) c.push_back(rational_of(x));
    Poly p(c);
    if (p.zero()) throw DomainError("log of the zero polynomial");
    return p;
}

inline json to_json(const Poly& p) {
    json a = json::array();
    for (auto& c : p.c) a.push_back(to_string(c));
    return a;
}

inline Piece piece_from_json(const json& j) {
    Piece p;
    if (j.contains("q0")) {
        std::string s = j.at("q0").is_string() ? j.at("q0").get<std::string>() : j.at("q0").dump();
        if (s != "-inf") p.terms.push_back(LogTerm{rational_of(j.at("q0")), {}});
    }
    if (j.contains("terms"))
        for (auto& t : j.at("terms")) {
            Rational q = rational_of(t.at(0));
            if (q < 0) throw DomainError("affable exponents must be nonnegative");
            if (q == 0) p.terms.push_back(LogTerm{0, {}});
            else p.terms.push_back(LogTerm{0, {{q, poly_from_json(t.at(1))}}});
        }
    if (j.contains("ext"))
        for (auto& t : j.at("ext")) {
            LogTerm lt{rational_of(t.value("offset", json("0"))), {}};
            for (auto& f : t.value("factors", json::array())) {
                Rational q = rational_of(f.at(0));
                if (q < 0) throw DomainError("affable exponents must be nonnegative");
                if (q > 0) lt.factors.push_back({q, poly_from_json(f.at(1))});
            }
            p.terms.push_back(lt);
        }
    if (p.terms.empty()) throw DomainError("a piece needs at least one finite branch");
    return p;
}

inline json to_json(const Piece& p) {
    json j{{"q0", "-inf"}, {"terms", json::array()}, {"ext", json::array()}};
    bool have_q0 = false;
    for (auto& t : p.terms) {
        if (t.factors.empty() && !have_q0) {
            j["q0"] = to_string(t.offset);
            have_q0 = true;
        } else if (t.offset == 0 && t.factors.size() == 1) {
            j["terms"].push_back(json::array({to_string(t.factors[0].first), to_json(t.factors[0].second)}));
        } else {
            json f = json::array();
            for (auto& [q, g] : t.factors) f.push_back(json::array({to_string(q), to_json(g)}));
            j["ext"].push_back(json{{"offset", to_string(t.offset)}, {"factors", f}});
        }
    }
    if (j["ext"].empty()) j.erase("ext");
    return j;
}

inline AffableFn affable_from_json(const json& j) {
    try {
        AffableFn f;
        f.id = j.value("id", std::string("f"));
        for (auto [key, c] : {std::pair{"chart0", Chart::Zero}, std::pair{"chartInf", Chart::Inf}}) {
            if (!j.contains(key)) throw DomainError("affable function '" + f.id + "' lacks " + key);
            const json& cj = j.at(key);
            ChartFn& cf = f.chart(c);
            cf.plus = cj.contains("plus") ? piece_from_json(cj.at("plus")) : Piece::constant(0);
            cf.minus = cj.contains("minus") ? piece_from_json(cj.at("minus")) : Piece::constant(0);
        }
        return f;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed affable function: ") + e.what());
    }
}

inline json to_json(const AffableFn& f) {
    json j{{"id", f.id}};
    for (auto [key, c] : {std::pair{"chart0", Chart::Zero}, std::pair{"chartInf", Chart::Inf}})
        j[key] = json{{"plus", to_json(f.chart(c).plus)}, {"minus", to_json(f.chart(c).minus)}};
    return j;
}

inline std::vector<AffableFn> battery_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("functions") ? j.at("functions") : j;
    if (!arr.is_array()) throw DomainError("expected an array of affable functions");
    std::vector<AffableFn> out;
    for (auto& e : arr) out.push_back(affable_from_json(e));
    return out;
}

// ---- measures ----

inline void write_measure_csv(std::ostream& os, const Measure& m) {
    os << "kind,point_or_center,logr_or_radius,weight\n";
    for (auto& [x, w] : m.atoms) {
        std::string pt, lr;
        if (x.is_disk()) {
            pt = to_string(*x.a);
            lr = to_string(x.logr);
        } else if (x.is_inf()) {
            pt = "inf";
        } else if (x.a) {
            pt = to_string(*x.a);
        } else {
            pt = fmt(x.z.real()) + (x.z.imag() < 0 ? "" : "+") + fmt(x.z.imag()) + "i";
        }
        os << "atom," << pt << "," << lr << "," << fmt(w) << "\n";
    }
    for (auto& h : m.haar)
        os << "haar," << fmt(h.center.real()) << (h.center.imag() < 0 ? "" : "+") << fmt(h.center.imag()) << "i,"
           << fmt(h.radius) << "," << fmt(h.weight) << "\n";
}

inline json measure_to_json(const Measure& m) {
    json j{{"atoms", json::array()}, {"haar", json::array()}};
    for (auto& [x, w] : m.atoms) j["atoms"].push_back(json{{"point", to_json(x)}, {"weight", w}});
    for (auto& h : m.haar)
        j["haar"].push_back(json{{"center", {h.center.real(), h.center.imag()}}, {"radius", h.radius}, {"weight", h.weight}});
    return j;
}

}  // namespace hybrid
