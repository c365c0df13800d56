#include "wlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wlab {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) bad(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) bad(where, std::string("missing field \"") + key + "\"");
    return *it;
}

std::string sub(const std::string& where, const std::string& key) { return where + "." + key; }
std::string idx(const std::string& where, std::size_t i) { return where + "[" + std::to_string(i) + "]"; }

int to_int(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    return j.get<int>();
}

std::vector<int> int_list(const Json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_int(j[i], idx(where, i)));
    return out;
}

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        // byte offset -> line and column (1-based)
        std::size_t off = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i < off; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        auto pos = msg.find("parse error");
        if (pos != std::string::npos) msg = msg.substr(pos);
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double to_number(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf" || s == "Infinity" || s == "+inf") return kInf;
        if (s == "-inf" || s == "-Infinity") return -kInf;
        if (s == "nan") return std::nan("");
    }
    bad(where, "expected a number");
}

Json to_json(const Point& x) {
    Json a = Json::array();
    for (int i = 0; i < x.size(); ++i) a.push_back(number(x[i]));
    return a;
}

Json to_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

Vec vec_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array of numbers");
    Vec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = to_number(j[i], idx(where, i));
    return v;
}

Point point_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of numbers");
    if (j.size() > 8) bad(where, "dimension above 8 is not supported");
    Point x(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) x[static_cast<int>(i)] = to_number(j[i], idx(where, i));
    return x;
}

Json to_json(const Mat& M) {
    Json a = Json::array();
    for (int i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < M.cols(); ++k) row.push_back(number(M(i, k)));
        a.push_back(row);
    }
    return a;
}

Mat matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) bad(where, "expected a nonempty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) bad(idx(where, 0), "expected a nonempty row");
    Mat M(static_cast<int>(j.size()), static_cast<int>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) bad(idx(where, i), "rows must all have " + std::to_string(cols) + " entries");
        for (std::size_t k = 0; k < cols; ++k)
            M(static_cast<int>(i), static_cast<int>(k)) = to_number(j[i][k], idx(idx(where, i), k));
    }
    return M;
}

// ---------------------------------------------------------------- domains

Json to_json(const Domain& dom) {
    Json j;
    switch (dom.kind()) {
        case DomainKind::polytope: {
            const auto& p = dom.as_polytope();
            j["type"] = "polytope";
            j["A"] = to_json(p.A);
            j["b"] = to_json(p.b);
            break;
        }
        case DomainKind::ball:
            j["type"] = "ball";
            j["center"] = to_json(dom.as_ball().center);
            j["radius"] = number(dom.as_ball().radius);
            break;
        case DomainKind::cone_body:
            j["type"] = "cone_body";
            j["xi"] = to_json(dom.as_cone_body().xi);
            j["eps"] = number(dom.as_cone_body().eps);
            break;
        case DomainKind::affine_image: {
            const auto& a = dom.as_affine();
            j["type"] = "affine_image";
            j["base"] = to_json(*a.base);
            j["matrix"] = to_json(a.map.M);
            j["shift"] = to_json(a.map.shift);
            break;
        }
        case DomainKind::union_of:
        case DomainKind::intersection: {
            j["type"] = dom.kind() == DomainKind::union_of ? "union" : "intersection";
            Json m = Json::array();
            for (const auto& d : dom.as_set_list().members) m.push_back(to_json(d));
            j["members"] = m;
            break;
        }
        case DomainKind::sweep: {
            const auto& s = dom.as_sweep();
            j["type"] = "sweep";
            j["base"] = to_json(*s.base);
            j["dir"] = to_json(s.dir);
            j["t0"] = number(s.t0);
            j["t1"] = number(s.t1);
            break;
        }
    }
    return j;
}

Domain domain_from_json(const Json& j, const std::string& where) {
    const Json& t = field(j, "type", where);
    if (!t.is_string()) bad(sub(where, "type"), "expected a string");
    const std::string type = t.get<std::string>();
    try {
        if (type == "polytope") {
            Mat A = matrix_from_json(field(j, "A", where), sub(where, "A"));
            Vec b = vec_from_json(field(j, "b", where), sub(where, "b"));
            if (b.size() != A.rows()) bad(sub(where, "b"), "length differs from the number of rows of A");
            return Domain::polytope(A, b);
        }
        if (type == "box")
            return Domain::box(point_from_json(field(j, "lo", where), sub(where, "lo")),
                               point_from_json(field(j, "hi", where), sub(where, "hi")));
        if (type == "polygon") {
            const Json& v = field(j, "vertices", where);
            if (!v.is_array()) bad(sub(where, "vertices"), "expected an array");
            std::vector<Point> pts;
            for (std::size_t i = 0; i < v.size(); ++i) pts.push_back(point_from_json(v[i], idx(sub(where, "vertices"), i)));
            return Domain::convex_polygon(pts);
        }
        if (type == "ball")
            return Domain::ball(point_from_json(field(j, "center", where), sub(where, "center")),
                                to_number(field(j, "radius", where), sub(where, "radius")));
        if (type == "cone_body")
            return Domain::cone_body(point_from_json(field(j, "xi", where), sub(where, "xi")),
                                     to_number(field(j, "eps", where), sub(where, "eps")));
        if (type == "affine_image") {
            Domain base = domain_from_json(field(j, "base", where), sub(where, "base"));
            Mat M = matrix_from_json(field(j, "matrix", where), sub(where, "matrix"));
            Point s = j.contains("shift") ? point_from_json(j["shift"], sub(where, "shift")) : Point(Point::Zero(M.rows()));
            return Domain::affine_image(base, AffineMap::make(M, s));
        }
        if (type == "union" || type == "intersection") {
            const Json& m = field(j, "members", where);
            if (!m.is_array() || m.empty()) bad(sub(where, "members"), "expected a nonempty array");
            std::vector<Domain> members;
            for (std::size_t i = 0; i < m.size(); ++i) members.push_back(domain_from_json(m[i], idx(sub(where, "members"), i)));
            return type == "union" ? Domain::union_of(members) : Domain::intersection(members);
        }
        if (type == "sweep")
            return Domain::sweep(domain_from_json(field(j, "base", where), sub(where, "base")),
                                 point_from_json(field(j, "dir", where), sub(where, "dir")),
                                 to_number(field(j, "t0", where), sub(where, "t0")),
                                 to_number(field(j, "t1", where), sub(where, "t1")));
    } catch (const DimensionError& e) {
        bad(where, e.what());
    }
    bad(sub(where, "type"), "unknown domain type \"" + type + "\"");
}

// ---------------------------------------------------------------- directions, bases, functions

Json to_json(const DirectionSet& E) {
    Json d = Json::array();
    for (const auto& x : E.dirs) d.push_back(to_json(x));
    return Json{{"dirs", d}, {"spread", number(E.spread)}, {"rank", E.rank}};
}

DirectionSet dirset_from_json(const Json& j, const std::string& where) {
    if (j.is_object() && j.contains("axes")) return DirectionSet::axes(to_int(j["axes"], sub(where, "axes")));
    const Json& d = field(j, "dirs", where);
    if (!d.is_array() || d.empty()) bad(sub(where, "dirs"), "expected a nonempty array");
    std::vector<Point> dirs;
    for (std::size_t i = 0; i < d.size(); ++i) {
        Point x = point_from_json(d[i], idx(sub(where, "dirs"), i));
        if (!dirs.empty() && x.size() != dirs[0].size()) bad(idx(sub(where, "dirs"), i), "dimension differs from the first direction");
        if (!(x.norm() > 0)) bad(idx(sub(where, "dirs"), i), "zero direction");
        dirs.push_back(x);
    }
    return DirectionSet(dirs);
}

Json to_json(const PolySpaceBasis& basis) {
    Json ex = Json::array();
    for (const auto& e : basis.exponents) ex.push_back(e);
    Json dirs = Json::array();
    for (const auto& x : basis.dirset.dirs) dirs.push_back(to_json(x));
    return Json{{"d", basis.d},           {"r", basis.r},
                {"n_basis", basis.size()}, {"exponents", ex},
                {"coeffs", basis.size() ? to_json(basis.coeffs) : Json::array()},
                {"dirs", dirs}};
}

Json to_json(const SampledFunction& f) {
    switch (f.kind()) {
        case FunctionKind::polynomial: {
            Json ex = Json::array();
            for (const auto& e : f.exponents()) ex.push_back(e);
            return Json{{"kind", "polynomial"}, {"exponents", ex}, {"coeffs", to_json(f.coeffs())}};
        }
        case FunctionKind::ridge_log: return Json{{"kind", "ridge_log"}, {"n", f.ridge_n()}, {"xi", to_json(f.ridge_xi())}};
        case FunctionKind::random_poly:
            return Json{{"kind", "random_poly"}, {"dim", f.dim()}, {"degree", f.degree()}, {"seed", f.seed()}};
        case FunctionKind::table: {
            Json pts = Json::array(), vals = Json::array();
            for (const auto& x : f.table_points()) pts.push_back(to_json(x));
            for (double v : f.table_values()) vals.push_back(number(v));
            return Json{{"kind", "table"}, {"points", pts}, {"values", vals}};
        }
        case FunctionKind::combination: {
            Json terms = Json::array(), w = Json::array();
            for (const auto& t : f.terms()) terms.push_back(to_json(t));
            for (double v : f.weights()) w.push_back(number(v));
            return Json{{"kind", "combination"}, {"weights", w}, {"terms", terms}};
        }
        case FunctionKind::composition:
            return Json{{"kind", "composition"},
                        {"function", to_json(f.terms()[0])},
                        {"matrix", to_json(f.map().M)},
                        {"shift", to_json(f.map().shift)}};
        case FunctionKind::callable: break;
    }
    return Json{{"kind", "callable"}, {"label", f.describe()}};
}

SampledFunction function_from_json(const Json& j, int dim, const std::string& where) {
    const Json& k = field(j, "kind", where);
    if (!k.is_string()) bad(sub(where, "kind"), "expected a string");
    const std::string kind = k.get<std::string>();
    try {
        if (kind == "polynomial") {
            const Json& ex = field(j, "exponents", where);
            if (!ex.is_array() || ex.empty()) bad(sub(where, "exponents"), "expected a nonempty array");
            std::vector<Exponent> exps;
            for (std::size_t i = 0; i < ex.size(); ++i) {
                exps.push_back(int_list(ex[i], idx(sub(where, "exponents"), i)));
                for (int a : exps.back())
                    if (a < 0) bad(idx(sub(where, "exponents"), i), "negative exponent");
            }
            Vec coeffs = vec_from_json(field(j, "coeffs", where), sub(where, "coeffs"));
            if (static_cast<std::size_t>(coeffs.size()) != exps.size()) bad(sub(where, "coeffs"), "length differs from exponents");
            return SampledFunction::polynomial(exps, coeffs);
        }
        if (kind == "ridge_log")
            return SampledFunction::ridge_log(to_int(field(j, "n", where), sub(where, "n")),
                                              point_from_json(field(j, "xi", where), sub(where, "xi")));
        if (kind == "random_poly") {
            int d = j.contains("dim") ? to_int(j["dim"], sub(where, "dim")) : dim;
            if (d < 1) bad(where, "random_poly needs \"dim\" (or --dim)");
            const Json& s = field(j, "seed", where);
            if (!s.is_number_integer()) bad(sub(where, "seed"), "expected an integer");
            return SampledFunction::random_poly(d, to_int(field(j, "degree", where), sub(where, "degree")), s.get<std::uint64_t>());
        }
        if (kind == "table") {
            const Json& pts = field(j, "points", where);
            const Json& vals = field(j, "values", where);
            if (!pts.is_array() || !vals.is_array() || pts.size() != vals.size()) bad(where, "points and values must be arrays of equal length");
            std::vector<Point> P;
            std::vector<double> V;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                P.push_back(point_from_json(pts[i], idx(sub(where, "points"), i)));
                V.push_back(to_number(vals[i], idx(sub(where, "values"), i)));
            }
            return SampledFunction::table(P, V);
        }
        if (kind == "combination") {
            const Json& terms = field(j, "terms", where);
            const Json& w = field(j, "weights", where);
            if (!terms.is_array() || !w.is_array() || terms.size() != w.size() || terms.empty())
                bad(where, "terms and weights must be nonempty arrays of equal length");
            std::vector<SampledFunction> fs;
            std::vector<double> ws;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                fs.push_back(function_from_json(terms[i], dim, idx(sub(where, "terms"), i)));
                ws.push_back(to_number(w[i], idx(sub(where, "weights"), i)));
            }
            return SampledFunction::combination(ws, fs);
        }
        if (kind == "composition") {
            SampledFunction f = function_from_json(field(j, "function", where), dim, sub(where, "function"));
            Mat M = matrix_from_json(field(j, "matrix", where), sub(where, "matrix"));
            Point s = j.contains("shift") ? point_from_json(j["shift"], sub(where, "shift")) : Point(Point::Zero(M.rows()));
            return SampledFunction::composition(f, AffineMap::make(M, s));
        }
    } catch (const PreconditionError& e) {
        bad(where, e.what());
    }
    bad(sub(where, "kind"), "unknown function kind \"" + kind + "\"");
}

// ---------------------------------------------------------------- results

Json to_json(const ApproxResult& a) {
    Json j{{"coeffs", to_json(a.coeffs)}, {"error", number(a.error)}, {"p", number(a.p)}, {"status", to_string(a.status)},
           {"iterations", a.iterations}};
    if (std::isinf(a.p)) j["duality_gap"] = number(a.duality_gap);
    return j;
}

Json to_json(const ModulusResult& m) {
    return Json{{"value", number(m.value)},        {"u", number(m.u)},
                {"xi", m.xi.size() ? to_json(m.xi) : Json::array()},
                {"xi_index", m.xi_index},          {"n_valid_points", m.n_valid_points},
                {"reliable", m.reliable},          {"empty", m.empty}};
}

Json to_json(const DecompositionChain& ch) {
    Json pieces = Json::array(), shifts = Json::array();
    for (const auto& p : ch.pieces) pieces.push_back(to_json(p));
    for (const auto& h : ch.shifts) shifts.push_back(to_json(h));
    Json j{{"pieces", pieces}, {"shifts", shifts}, {"r", ch.r}, {"provenance", ch.provenance}};
    if (ch.dirset.size()) {
        Json d = Json::array();
        for (const auto& x : ch.dirset.dirs) d.push_back(to_json(x));
        j["dirs"] = d;
    }
    if (ch.target.dim()) j["target"] = to_json(ch.target);
    return j;
}

DecompositionChain chain_from_json(const Json& j, const std::string& where) {
    DecompositionChain ch;
    ch.r = to_int(field(j, "r", where), sub(where, "r"));
    if (ch.r < 1) bad(sub(where, "r"), "order must be >= 1");
    if (j.contains("provenance")) {
        if (!j["provenance"].is_string()) bad(sub(where, "provenance"), "expected a string");
        ch.provenance = j["provenance"].get<std::string>();
    }
    const Json& pieces = field(j, "pieces", where);
    const Json& shifts = field(j, "shifts", where);
    if (!pieces.is_array() || pieces.empty()) bad(sub(where, "pieces"), "expected a nonempty array");
    if (!shifts.is_array() || shifts.size() + 1 != pieces.size()) bad(sub(where, "shifts"), "expected one shift per piece after the first");
    for (std::size_t i = 0; i < pieces.size(); ++i) ch.pieces.push_back(domain_from_json(pieces[i], idx(sub(where, "pieces"), i)));
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        ch.shifts.push_back(point_from_json(shifts[i], idx(sub(where, "shifts"), i)));
        if (ch.shifts.back().size() != ch.pieces[0].dim()) bad(idx(sub(where, "shifts"), i), "dimension differs from the pieces");
    }
    for (std::size_t i = 1; i < ch.pieces.size(); ++i)
        if (ch.pieces[i].dim() != ch.pieces[0].dim()) bad(idx(sub(where, "pieces"), i), "dimension differs from piece 0");
    if (j.contains("dirs")) {
        ch.dirset = dirset_from_json(Json{{"dirs", j["dirs"]}}, where);
    } else {
        // the shift directions themselves
        std::vector<Point> dirs;
        for (const auto& h : ch.shifts) {
            if (!(h.norm() > 0)) continue;
            Point u = h / h.norm();
            bool seen = false;
            for (const auto& v : dirs) seen = seen || (u - v).norm() < 1e-12;
            if (!seen) dirs.push_back(u);
        }
        if (!dirs.empty()) ch.dirset = DirectionSet(dirs);
    }
    if (j.contains("target")) ch.target = domain_from_json(j["target"], sub(where, "target"));
    ch.hints.assign(ch.pieces.size(), {});
    return ch;
}

Json to_json(const ChainReport& rep) {
    Json w = Json::array();
    for (const auto& x : rep.witnesses) w.push_back(to_json(x));
    return Json{{"ok", rep.ok},
                {"worst_violation", number(rep.worst_violation)},
                {"witnesses", w},
                {"bad_pieces", rep.bad_pieces},
                {"samples", rep.samples},
                {"empty_pieces", rep.empty_pieces},
                {"shifts_in_dirset", rep.shifts_in_dirset},
                {"coverage_miss", number(rep.coverage_miss)},
                {"coverage_ok", rep.coverage_ok}};
}

Json to_json(const ChainBound& b) {
    return Json{{"m", b.m},
                {"r", b.r},
                {"p", number(b.p)},
                {"theta", number(b.theta)},
                {"w0", number(b.w0)},
                {"recursion", number(b.recursion)},
                {"closed_form", number(b.closed_form)},
                {"overflow", b.overflow},
                {"w0_assumption", b.w0_assumption}};
}

Json to_json(const WhitneyEstimate& est) {
    Json ratios = Json::array();
    for (const auto& r : est.ratios) ratios.push_back(r ? number(*r) : Json(nullptr));
    return Json{{"domain_id", est.domain_id},
                {"E_id", est.dirset_id},
                {"r", est.r},
                {"p", number(est.p)},
                {"theta", number(est.theta)},
                {"lower_bound", number(est.lower_bound)},
                {"upper_bound", est.upper_bound ? number(*est.upper_bound) : Json(nullptr)},
                {"consistent", est.consistent},
                {"witness", est.witness},
                {"witness_spec", est.witness_spec},
                {"n_defined", est.n_defined},
                {"n_tried", est.n_tried},
                {"ratios", ratios}};
}

Json to_json(const Certificate& cert) {
    Json rows = Json::array();
    for (const auto& r : cert.rows)
        rows.push_back(Json{{"n", r.n},
                            {"modulus", number(r.modulus)},
                            {"modulus_reliable", r.modulus_reliable},
                            {"floor", number(r.floor)},
                            {"numeric_Er", number(r.numeric_er)},
                            {"growth_certified", r.growth_certified}});
    return Json{{"d", cert.d},
                {"r", cert.r},
                {"eps", number(cert.eps)},
                {"xi", to_json(cert.xi)},
                {"margin", number(cert.margin)},
                {"modulus_ratio", number(cert.modulus_ratio)},
                {"modulus_bounded", cert.modulus_bounded},
                {"rows", rows}};
}

}  // namespace wlab
