#include "wlab/cli.hpp"

#include "wlab/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace wlab {

namespace {

struct Config {
    std::string command;
    int dim = 0;
    int order = 1;
    std::string p = "2";
    double t = 0;  // 0: diameter of the domain
    std::string dirs, domain, function, chain, out, format, config;
    std::uint64_t seed = 1;
    int density = 4096;
    int grid = 0;  // > 0: lattice plan with this many points per axis
    // chain-bound / decompose / verify
    double w0 = 0;
    int m = -1;
    std::string method = "star";
    double delta = 1, eps = 0.25, R = 0;
    int n0 = 0;
    int samples = 10000;
    // counterexample
    std::string ns = "1,4,16,64";
    std::string xi;
    double cone_eps = 0.01;
    // whitney-estimate / report
    std::string family = "random_poly";
    int family_size = 100;
    int degree = -1;
    int budget = 0;
    int max_iter = 500;  // approx iteration cap
    std::string orders = "1,2", ps = "1,inf";
};

[[noreturn]] void input_error(const std::string& msg) { throw InputError(msg); }

double parse_p(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "infinity") return kInf;
    double v = 0;
    try {
        auto slash = s.find('/');
        std::size_t used = 0;
        if (slash != std::string::npos) {
            double a = std::stod(s.substr(0, slash)), b = std::stod(s.substr(slash + 1), &used);
            if (used != s.size() - slash - 1) throw std::invalid_argument(s);
            v = a / b;
        } else {
            v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
        }
    } catch (const std::logic_error&) {
        input_error("--p: cannot parse \"" + s + "\"");
    }
    if (!(v > 0)) input_error("--p: must be positive");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<int> int_list(const std::string& s, const char* flag) {
    std::vector<int> out;
    for (const auto& tok : split(s, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::logic_error&) {
            input_error(std::string(flag) + ": cannot parse \"" + tok + "\"");
        }
    }
    if (out.empty()) input_error(std::string(flag) + ": empty list");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) input_error(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string basename_of(const std::string& path) {
    auto s = path.find_last_of('/');
    return s == std::string::npos ? path : path.substr(s + 1);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Output context shared by the subcommands.
struct Run {
    Config cfg;
    std::map<std::string, std::string> resolved;  // flag -> value, for hashing
    std::string hash;

    Json meta() const {
        return Json{{"tool_version", kToolVersion}, {"seed", cfg.seed}, {"config_hash", hash}, {"command", cfg.command}};
    }
};

std::string config_hash(const Run& run) {
    std::string canon = run.cfg.command + "\n";
    for (const auto& [k, v] : run.resolved) canon += k + "=" + v + "\n";
    for (const std::string* f : {&run.cfg.domain, &run.cfg.dirs, &run.cfg.function, &run.cfg.chain})
        if (!f->empty()) canon += "file:" + read_file(*f) + "\n";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
    return buf;
}

// CSV writer: header row, '.' decimals, LF endings, provenance columns last.
class Csv {
public:
    explicit Csv(std::vector<std::string> cols) : cols_(std::move(cols)) {}
    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
    std::string str(const Run& run) const {
        std::string s;
        auto esc = [](const std::string& c) {
            if (c.find_first_of(",\"\n") == std::string::npos) return c;
            std::string q = "\"";
            for (char ch : c) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        };
        for (std::size_t i = 0; i < cols_.size(); ++i) s += (i ? "," : "") + esc(cols_[i]);
        s += ",tool_version,seed,config_hash\n";
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + esc(r[i]);
            s += std::string(",") + kToolVersion + "," + std::to_string(run.cfg.seed) + "," + run.hash + "\n";
        }
        return s;
    }

private:
    std::vector<std::string> cols_;
    std::vector<std::vector<std::string>> rows_;
};

std::string num(double x) { return format_double(x); }

std::string join_point(const Point& x) {
    std::string s;
    for (int i = 0; i < x.size(); ++i) s += (i ? " " : "") + num(x[i]);
    return s;
}

// ---------------------------------------------------------------- loading inputs

Domain load_domain(const Run& run, int fallback_dim) {
    if (!run.cfg.domain.empty()) return domain_from_json(read_json_file(run.cfg.domain), basename_of(run.cfg.domain));
    int d = run.cfg.dim > 0 ? run.cfg.dim : fallback_dim;
    if (d < 1) input_error("--domain or --dim is required");
    return Domain::box(Point::Zero(d), Point::Ones(d));
}

DirectionSet load_dirs(const Run& run, int d) {
    if (run.cfg.dirs.empty()) return DirectionSet::axes(d);
    DirectionSet E = dirset_from_json(read_json_file(run.cfg.dirs), basename_of(run.cfg.dirs));
    if (E.dim() != d) throw DimensionError("direction set has dimension " + std::to_string(E.dim()) + ", expected " + std::to_string(d));
    return E;
}

SampledFunction load_function(const Run& run, int d) {
    if (run.cfg.function.empty()) input_error("--function is required");
    SampledFunction f = function_from_json(read_json_file(run.cfg.function), d, basename_of(run.cfg.function));
    if (f.dim() != d) throw DimensionError("function has dimension " + std::to_string(f.dim()) + ", expected " + std::to_string(d));
    return f;
}

SamplePlan load_plan(const Run& run, const Domain& dom) {
    if (run.cfg.grid > 0) return grid_plan(dom, run.cfg.grid);
    if (run.cfg.density < 1) input_error("--density must be >= 1");
    return make_plan(dom, run.cfg.density, run.cfg.seed);
}

DecompositionChain load_chain(const Run& run) {
    if (run.cfg.chain.empty()) input_error("--chain is required");
    return chain_from_json(read_json_file(run.cfg.chain), basename_of(run.cfg.chain));
}

VerifyOptions verify_options(const Run& run) {
    VerifyOptions v;
    v.samples_per_piece = run.cfg.samples;
    v.seed = run.cfg.seed;
    return v;
}

std::string dirs_id(const Run& run) { return run.cfg.dirs.empty() ? "axes" : basename_of(run.cfg.dirs); }
std::string domain_id(const Run& run) {
    return run.cfg.domain.empty() ? "unit_cube" : basename_of(run.cfg.domain);
}

struct Output {
    std::string text;
    int code = 0;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

bool want_csv(const Run& run, bool csv_default) {
    const std::string& f = run.cfg.format;
    if (f.empty()) return csv_default;
    if (f == "csv") return true;
    if (f == "json") return false;
    input_error("--format must be csv or json");
}

// ---------------------------------------------------------------- subcommands

Output cmd_basis(const Run& run) {
    int d = run.cfg.dim;
    DirectionSet E = run.cfg.dirs.empty() ? DirectionSet() : dirset_from_json(read_json_file(run.cfg.dirs), basename_of(run.cfg.dirs));
    if (d < 1) d = E.dim();
    if (d < 1) input_error("--dim is required");
    if (E.size() == 0) E = DirectionSet::axes(d);
    if (E.dim() != d) throw DimensionError("direction set dimension differs from --dim");
    PolySpaceBasis B = build_basis(d, run.cfg.order, E);
    if (want_csv(run, false)) {
        Csv csv({"d", "r", "n_basis", "n_monomials", "annihilation_residual"});
        csv.row({std::to_string(B.d), std::to_string(B.r), std::to_string(B.size()), std::to_string(B.n_monomials()),
                 num(annihilation_residual(B))});
        return {csv.str(run)};
    }
    Json j = run.meta();
    j.update(to_json(B));
    j["annihilation_residual"] = number(annihilation_residual(B));
    return {dump(j)};
}

Output cmd_modulus(const Run& run) {
    Domain dom = load_domain(run, 0);
    const int d = dom.dim();
    DirectionSet E = load_dirs(run, d);
    SampledFunction f = load_function(run, d);
    SamplePlan plan = load_plan(run, dom);
    double p = parse_p(run.cfg.p);
    double t = run.cfg.t > 0 ? run.cfg.t : diameter(dom).value;
    ModulusResult m = set_modulus(f, dom, plan, E, run.cfg.order, t, p);
    if (want_csv(run, false)) {
        Csv csv({"r", "p", "t", "value", "u", "xi_index", "n_valid_points", "reliable", "plan_size"});
        csv.row({std::to_string(run.cfg.order), num(p), num(t), num(m.value), num(m.u), std::to_string(m.xi_index),
                 std::to_string(m.n_valid_points), m.reliable ? "true" : "false", std::to_string(plan.size())});
        return {csv.str(run)};
    }
    Json j = run.meta();
    j["r"] = run.cfg.order;
    j["p"] = number(p);
    j["t"] = number(t);
    j["plan_size"] = plan.size();
    j["modulus"] = to_json(m);
    return {dump(j)};
}

Output cmd_approx(const Run& run) {
    Domain dom = load_domain(run, 0);
    const int d = dom.dim();
    DirectionSet E = load_dirs(run, d);
    SampledFunction f = load_function(run, d);
    SamplePlan plan = load_plan(run, dom);
    double p = parse_p(run.cfg.p);
    PolySpaceBasis B = build_basis(d, run.cfg.order, E);
    ApproxOptions ao;
    ao.max_iter = run.cfg.max_iter;
    ApproxResult a = best_approx(f, dom, plan, B, p, ao);
    // a capped solver still reports its iterate, with exit 3
    const int code = a.status == ApproxStatus::max_iter ? 3 : 0;
    if (want_csv(run, false)) {
        Csv csv({"r", "p", "error", "status", "iterations", "n_basis"});
        csv.row({std::to_string(run.cfg.order), num(p), num(a.error), to_string(a.status), std::to_string(a.iterations),
                 std::to_string(B.size())});
        return {csv.str(run), code};
    }
    Json j = run.meta();
    j["r"] = run.cfg.order;
    j["n_basis"] = B.size();
    j["approx"] = to_json(a);
    return {dump(j), code};
}

FamilySpec family_from(const Run& run, int d) {
    FamilySpec fam;
    const std::string& k = run.cfg.family;
    if (k == "random_poly") {
        fam.kind = FamilyKind::random_poly;
    } else if (k == "ridge_log") {
        fam.kind = FamilyKind::ridge_log;
        fam.ns = int_list(run.cfg.ns, "--n");
        if (!run.cfg.xi.empty()) fam.xi = point_from_json(parse_json(run.cfg.xi, "--xi"), "--xi");
    } else if (k == "perturbed_basis") {
        fam.kind = FamilyKind::perturbed_basis;
    } else {
        input_error("--family must be random_poly, ridge_log or perturbed_basis");
    }
    (void)d;
    fam.size = run.cfg.family_size;
    fam.degree = run.cfg.degree;
    fam.seed = run.cfg.seed;
    return fam;
}

std::vector<std::string> report_columns() {
    return {"domain_id", "E_id", "r", "p", "lower_bound", "upper_bound", "w0_assumption", "witness_spec", "n_defined", "n_tried", "consistent"};
}

std::vector<std::string> report_row(const WhitneyEstimate& est, const std::string& w0_assumption) {
    return {est.domain_id,
            est.dirset_id,
            std::to_string(est.r),
            num(est.p),
            num(est.lower_bound),
            est.upper_bound ? num(*est.upper_bound) : "",
            w0_assumption,
            est.witness_spec,
            std::to_string(est.n_defined),
            std::to_string(est.n_tried),
            est.consistent ? "true" : "false"};
}

// Optional verified-chain upper bound for the estimate.
std::optional<ChainBound> chain_bound_for(const Run& run, double p) {
    if (run.cfg.chain.empty()) return std::nullopt;
    VerifiedChain vc = verified(load_chain(run), verify_options(run));
    std::ostringstream os;
    os << "w_r(E_0;E)_p <= " << format_double(run.cfg.w0) << " (declared)";
    return chain_upper_bound(vc, run.cfg.w0, p, os.str());
}

WhitneyEstimate estimate(const Run& run, int r, double p, std::string* w0_text) {
    Domain dom = load_domain(run, 0);
    const int d = dom.dim();
    DirectionSet E = load_dirs(run, d);
    SamplePlan plan = load_plan(run, dom);
    WhitneyEstimate est = empirical_whitney_constant(dom, plan, E, r, p, family_from(run, d), run.cfg.budget);
    est.domain_id = domain_id(run);
    est.dirset_id = dirs_id(run);
    if (auto cb = chain_bound_for(run, p)) {
        attach_upper_bound(est, cb->recursion);
        if (w0_text) *w0_text = cb->w0_assumption;
    }
    return est;
}

Output cmd_whitney_estimate(const Run& run) {
    double p = parse_p(run.cfg.p);
    std::string w0_text;
    WhitneyEstimate est = estimate(run, run.cfg.order, p, &w0_text);
    if (want_csv(run, false)) {
        Csv csv(report_columns());
        csv.row(report_row(est, w0_text));
        return {csv.str(run)};
    }
    Json j = run.meta();
    j["estimate"] = to_json(est);
    j["w0_assumption"] = w0_text;
    return {dump(j)};
}

Output cmd_report(const Run& run) {
    Csv csv(report_columns());
    Json rows = Json::array();
    for (int r : int_list(run.cfg.orders, "--orders"))
        for (const auto& ps : split(run.cfg.ps, ',')) {
            std::string w0_text;
            WhitneyEstimate est = estimate(run, r, parse_p(ps), &w0_text);
            csv.row(report_row(est, w0_text));
            Json row = to_json(est);
            row.erase("ratios");
            row["w0_assumption"] = w0_text;
            rows.push_back(row);
        }
    if (want_csv(run, true)) return {csv.str(run)};
    Json j = run.meta();
    j["rows"] = rows;
    return {dump(j)};
}

Output cmd_chain_bound(const Run& run) {
    double p = parse_p(run.cfg.p);
    ChainBound b;
    std::optional<ChainReport> rep;
    if (!run.cfg.chain.empty()) {
        VerifiedChain vc = verified(load_chain(run), verify_options(run));
        rep = vc.report;
        std::ostringstream os;
        os << "w_r(E_0;E)_p <= " << format_double(run.cfg.w0) << " (declared)";
        b = chain_upper_bound(vc, run.cfg.w0, p, os.str());
    } else {
        if (run.cfg.m < 0) input_error("chain-bound needs --chain or --m");
        b = chain_upper_bound(run.cfg.m, run.cfg.order, run.cfg.w0, p);
        b.w0_assumption = "w_r(E_0;E)_p <= " + format_double(run.cfg.w0) + " (declared, chain not checked)";
    }
    if (want_csv(run, false)) {
        Csv csv({"m", "r", "p", "theta", "w0", "recursion", "closed_form", "overflow", "w0_assumption"});
        csv.row({std::to_string(b.m), std::to_string(b.r), num(b.p), num(b.theta), num(b.w0), num(b.recursion),
                 num(b.closed_form), b.overflow ? "true" : "false", b.w0_assumption});
        return {csv.str(run)};
    }
    Json j = run.meta();
    j["bound"] = to_json(b);
    if (rep) j["verification"] = to_json(*rep);
    j["length_factor"] = length_factor(b.r, p).text;
    return {dump(j)};
}

Output cmd_decompose(const Run& run) {
    const std::string& method = run.cfg.method;
    DecompositionChain ch;
    Json extra = Json::object();
    if (method == "slices") {
        // ball_direction_slices around the ball given as --domain
        Domain dom = load_domain(run, 0);
        if (dom.kind() != DomainKind::ball) throw PreconditionError("decompose slices: --domain must be a ball");
        DirectionSet E = load_dirs(run, dom.dim());
        ch = ball_direction_slices(dom.as_ball().center, dom.as_ball().radius, E, run.cfg.order);
        extra["sigma"] = number(slice_sigma(std::min(E.spread, 1 - 1e-9), run.cfg.order));
    } else {
        Domain dom = load_domain(run, 0);
        const int d = dom.dim();
        if (method == "star") {
            double R = run.cfg.R;
            if (!(R > 0)) {
                // smallest origin-centred radius containing the samples
                Rng rng(run.cfg.seed);
                R = 1;
                if (dom.kind() == DomainKind::polytope)
                    for (const auto& v : polytope_vertices(dom)) R = std::max(R, v.norm());
                else
                    for (const auto& x : sample_points(dom, 20000, rng)) R = std::max(R, x.norm());
            }
            ch = star_shaped_decomposition(dom, R, run.cfg.order, run.cfg.seed);
            extra["R"] = number(R);
        } else if (method == "planar") {
            PlanarChain pc = planar_two_direction_chain(dom, run.cfg.order);
            ch = pc.chain;
            extra["margin"] = number(pc.margin);
        } else if (method == "lip2") {
            ch = lip2_ball_chain(dom, load_dirs(run, d), run.cfg.order, run.cfg.delta, run.cfg.eps);
        } else if (method == "xray") {
            ch = xray_slab_decomposition(dom, load_dirs(run, d), run.cfg.n0, run.cfg.order);
        } else {
            input_error("--method must be star, planar, lip2, xray or slices");
        }
    }
    ChainReport rep = verify_chain(ch, verify_options(run));
    if (want_csv(run, false)) {
        std::vector<std::string> cols = {"k", "kind"};
        for (int i = 0; i < ch.dim(); ++i) cols.push_back("h" + std::to_string(i + 1));
        Csv csv(cols);
        for (int k = 0; k <= ch.m(); ++k) {
            std::vector<std::string> row = {std::to_string(k), to_string(ch.pieces[k].kind())};
            for (int i = 0; i < ch.dim(); ++i) row.push_back(k ? num(ch.shifts[k - 1][i]) : "");
            csv.row(row);
        }
        return {csv.str(run), rep.ok ? 0 : 2};
    }
    Json j = run.meta();
    j.update(to_json(ch));
    j["m"] = ch.m();
    j["verification"] = to_json(rep);
    j["construction"] = extra;
    return {dump(j), rep.ok ? 0 : 2};
}

Output cmd_verify_chain(const Run& run) {
    DecompositionChain ch = load_chain(run);
    ChainReport rep = verify_chain(ch, verify_options(run));
    if (want_csv(run, false)) {
        Csv csv({"ok", "m", "r", "worst_violation", "n_witnesses", "bad_pieces", "samples", "coverage_miss"});
        std::string bad;
        for (std::size_t i = 0; i < rep.bad_pieces.size(); ++i) bad += (i ? " " : "") + std::to_string(rep.bad_pieces[i]);
        csv.row({rep.ok ? "true" : "false", std::to_string(ch.m()), std::to_string(ch.r), num(rep.worst_violation),
                 std::to_string(rep.witnesses.size()), bad, std::to_string(rep.samples), num(rep.coverage_miss)});
        return {csv.str(run), rep.ok ? 0 : 2};
    }
    Json j = run.meta();
    j["m"] = ch.m();
    j["r"] = ch.r;
    j["verification"] = to_json(rep);
    return {dump(j), rep.ok ? 0 : 2};
}

Output cmd_counterexample(const Run& run) {
    const int d = run.cfg.dim > 0 ? run.cfg.dim : 2;
    Point xi = run.cfg.xi.empty() ? Point(Point::Unit(d, d - 1)) : point_from_json(parse_json(run.cfg.xi, "--xi"), "--xi");
    if (xi.size() != d) throw DimensionError("--xi dimension differs from --dim");
    DirectionSet E;
    if (!run.cfg.dirs.empty()) {
        E = load_dirs(run, d);
    } else {
        // axes orthogonal to xi plus one direction 80 degrees from the first
        if (d < 2 || (xi - Point::Unit(d, d - 1)).norm() > 1e-12) input_error("--dirs is required unless xi = e_d with d >= 2");
        std::vector<Point> dirs;
        for (int i = 0; i + 1 < d; ++i) dirs.push_back(Point::Unit(d, i));
        double a = 80 * M_PI / 180;
        dirs.push_back(std::cos(a) * Point::Unit(d, 0) + std::sin(a) * Point::Unit(d, d - 1));
        E = DirectionSet(dirs);
    }
    CertificateOptions opt;
    if (run.resolved.count("--density")) opt.density = run.cfg.density;
    opt.seed = run.cfg.seed;
    Certificate cert = counterexample_certificate(d, xi, run.cfg.cone_eps, E, run.cfg.order, int_list(run.cfg.ns, "--n"), opt);
    if (want_csv(run, true)) {
        Csv csv({"n", "modulus", "floor", "numeric_Er", "growth_certified", "modulus_reliable"});
        for (const auto& r : cert.rows)
            csv.row({std::to_string(r.n), num(r.modulus), num(r.floor), num(r.numeric_er), r.growth_certified ? "true" : "false",
                     r.modulus_reliable ? "true" : "false"});
        return {csv.str(run)};
    }
    Json j = run.meta();
    j["certificate"] = to_json(cert);
    return {dump(j)};
}

Output cmd_xray_check(const Run& run) {
    Domain dom = load_domain(run, 0);
    DirectionSet E = load_dirs(run, dom.dim());
    auto sample = boundary_sample(dom, run.cfg.samples, run.cfg.seed);
    XrayResult xr = xray_verifies(dom, E, sample);
    if (want_csv(run, false)) {
        Csv csv({"witness"});
        for (const auto& w : xr.witnesses) csv.row({join_point(w)});
        return {csv.str(run)};
    }
    Json j = run.meta();
    Json w = Json::array();
    for (const auto& x : xr.witnesses) w.push_back(to_json(x));
    j["ok"] = xr.ok;
    j["boundary_samples"] = sample.size();
    j["witnesses"] = w;
    return {dump(j)};
}

// --config FILE: a JSON object of long option names; command-line flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    Json j = read_json_file(path);
    if (!j.is_object()) input_error(path + ": expected a JSON object of options");
    std::vector<std::string> out = args;
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string flag = "--" + it.key();
        bool given = false;
        for (const auto& a : args) given = given || a == flag || a.rfind(flag + "=", 0) == 0;
        if (given) continue;
        const Json& v = it.value();
        std::string s;
        if (v.is_string()) {
            s = v.get<std::string>();
        } else if (v.is_number_integer()) {
            s = std::to_string(v.get<long long>());
        } else if (v.is_number()) {
            s = format_double(v.get<double>());
        } else if (v.is_array()) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number() && !v[i].is_string()) input_error(path + ": option \"" + it.key() + "\" has a non-scalar entry");
                s += (i ? "," : "") + (v[i].is_string() ? v[i].get<std::string>() : v[i].dump());
            }
        } else {
            input_error(path + ": option \"" + it.key() + "\" must be a string, number or list");
        }
        out.push_back(flag);
        out.push_back(s);
    }
    return out;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Run run;
    Config& c = run.cfg;
    CLI::App app{"Numerical lab for directional Whitney inequalities", "whitney_lab"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::map<std::string, CLI::App*> subs;
    auto sub = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        subs[name] = s;
        s->add_option("--config", c.config, "JSON file of options");
        s->add_option("--seed", c.seed, "random seed");
        s->add_option("--out", c.out, "output file (default stdout)");
        s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        return s;
    };
    auto geometry = [&](CLI::App* s) {
        s->add_option("--dim", c.dim, "dimension");
        s->add_option("--domain", c.domain, "domain JSON file");
        s->add_option("--dirs", c.dirs, "direction set JSON file (default: coordinate axes)");
    };
    auto sampling = [&](CLI::App* s) {
        s->add_option("--density", c.density, "number of sample points");
        s->add_option("--grid", c.grid, "lattice plan with this many points per axis");
    };

    CLI::App* s = sub("basis", "basis of the restricted polynomial space");
    s->add_option("--dim", c.dim, "dimension");
    s->add_option("--order", c.order, "order r");
    s->add_option("--dirs", c.dirs, "direction set JSON file");

    s = sub("modulus", "directional modulus of smoothness");
    geometry(s);
    sampling(s);
    s->add_option("--function", c.function, "function JSON file")->required();
    s->add_option("--order", c.order, "order r");
    s->add_option("--p", c.p, "exponent (inf allowed)");
    s->add_option("--t", c.t, "shift bound (default: diameter)");

    s = sub("approx", "best approximation from the restricted space");
    geometry(s);
    sampling(s);
    s->add_option("--function", c.function, "function JSON file")->required();
    s->add_option("--order", c.order, "order r");
    s->add_option("--p", c.p, "exponent (inf allowed)");
    s->add_option("--max-iter", c.max_iter, "iteration cap of the iterative solvers")->check(CLI::PositiveNumber);

    for (const char* name : {"whitney-estimate", "report"}) {
        s = sub(name, name == std::string("report") ? "report rows over orders and exponents" : "empirical Whitney lower bound");
        geometry(s);
        sampling(s);
        s->add_option("--family", c.family, "random_poly, ridge_log or perturbed_basis");
        s->add_option("--family-size", c.family_size, "number of family members");
        s->add_option("--degree", c.degree, "random_poly degree (default d(r-1)+3)");
        s->add_option("--n", c.ns, "ridge_log parameters, comma separated");
        s->add_option("--xi", c.xi, "ridge direction as a JSON array");
        s->add_option("--budget", c.budget, "evaluate at most this many members");
        s->add_option("--chain", c.chain, "chain JSON file for an upper bound");
        s->add_option("--w0", c.w0, "declared bound for the first piece");
        s->add_option("--samples", c.samples, "verification samples per piece");
        if (name == std::string("report")) {
            s->add_option("--orders", c.orders, "orders, comma separated");
            s->add_option("--ps", c.ps, "exponents, comma separated");
        } else {
            s->add_option("--order", c.order, "order r");
            s->add_option("--p", c.p, "exponent (inf allowed)");
        }
    }

    s = sub("chain-bound", "upper bound from a verified chain");
    s->add_option("--chain", c.chain, "chain JSON file");
    s->add_option("--m", c.m, "number of links (without --chain)");
    s->add_option("--order", c.order, "order r (without --chain)");
    s->add_option("--w0", c.w0, "declared bound for the first piece");
    s->add_option("--p", c.p, "exponent (inf allowed)");
    s->add_option("--samples", c.samples, "verification samples per piece");

    s = sub("decompose", "build a decomposition chain");
    geometry(s);
    s->add_option("--method", c.method, "star, planar, lip2, xray or slices");
    s->add_option("--order", c.order, "order r");
    s->add_option("--R", c.R, "outer radius for star (default: from the domain)");
    s->add_option("--delta", c.delta, "ball radius for lip2");
    s->add_option("--eps", c.eps, "overlap parameter for lip2");
    s->add_option("--n0", c.n0, "shrink index for xray (0: search)");
    s->add_option("--samples", c.samples, "verification samples per piece");

    s = sub("verify-chain", "check the shift condition of a chain");
    s->add_option("--chain", c.chain, "chain JSON file")->required();
    s->add_option("--samples", c.samples, "samples per piece");

    s = sub("counterexample", "divergence certificate on the cone body");
    s->add_option("--dim", c.dim, "dimension (default 2)");
    s->add_option("--order", c.order, "order r");
    s->add_option("--eps", c.cone_eps, "cone parameter eps");
    s->add_option("--n", c.ns, "ridge_log parameters, comma separated");
    s->add_option("--xi", c.xi, "cone axis as a JSON array (default e_d)");
    s->add_option("--dirs", c.dirs, "direction set JSON file");
    s->add_option("--density", c.density, "number of sample points");

    s = sub("xray-check", "test whether E X-rays a convex body");
    geometry(s);
    s->add_option("--samples", c.samples, "boundary samples");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = expand_config(args);
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "whitney_lab: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        err << "whitney_lab: " << e.what() << "\n";
        return 1;
    }

    for (const auto& [name, a] : subs)
        if (a->parsed()) {
            c.command = name;
            for (const CLI::Option* o : a->get_options())
                if (o->count() > 0 && o->get_name() != "--out" && o->get_name() != "--config")
                    run.resolved[o->get_name()] = o->as<std::string>();
        }

    try {
        run.hash = config_hash(run);
        Output o;
        if (c.command == "basis") o = cmd_basis(run);
        else if (c.command == "modulus") o = cmd_modulus(run);
        else if (c.command == "approx") o = cmd_approx(run);
        else if (c.command == "whitney-estimate") o = cmd_whitney_estimate(run);
        else if (c.command == "report") o = cmd_report(run);
        else if (c.command == "chain-bound") o = cmd_chain_bound(run);
        else if (c.command == "decompose") o = cmd_decompose(run);
        else if (c.command == "verify-chain") o = cmd_verify_chain(run);
        else if (c.command == "counterexample") o = cmd_counterexample(run);
        else if (c.command == "xray-check") o = cmd_xray_check(run);
        if (c.out.empty()) {
            out << o.text;
        } else {
            std::ofstream f(c.out, std::ios::binary);
            if (!f) throw InputError(c.out + ": cannot open for writing");
            f << o.text;
        }
        return o.code;
    } catch (const InputError& e) {
        err << "whitney_lab: input error: " << e.what() << "\n";
        return 1;
    } catch (const PreconditionError& e) {
        err << "whitney_lab: precondition failed: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        err << "whitney_lab: no convergence: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        err << "whitney_lab: input error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace wlab
