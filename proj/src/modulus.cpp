#include "wlab/modulus.hpp"

#include "wlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace wlab {

const char* to_string(FunctionKind k) {
    switch (k) {
        case FunctionKind::polynomial: return "polynomial";
        case FunctionKind::ridge_log: return "ridge_log";
        case FunctionKind::random_poly: return "random_poly";
        case FunctionKind::table: return "table";
        case FunctionKind::callable: return "callable";
        case FunctionKind::combination: return "combination";
        case FunctionKind::composition: return "composition";
    }
    return "?";
}

struct SampledFunction::Node {
    FunctionKind kind;
    int d = 0;
    std::vector<Exponent> exponents;
    Vec coeffs;
    int n = 0;
    Point xi;
    int degree = 0;
    std::uint64_t seed = 0;
    std::vector<Point> points;
    std::vector<double> values;
    std::map<std::vector<long long>, double> lookup;
    std::function<double(const Point&)> fn;
    std::string label;
    std::vector<double> weights;
    std::vector<SampledFunction> terms;
    AffineMap map;
};

namespace {

constexpr double kTableResolution = 1e-9;

std::vector<long long> table_key(const Point& x) {
    std::vector<long long> k(x.size());
    for (int i = 0; i < x.size(); ++i) k[i] = std::llround(x[i] / kTableResolution);
    return k;
}

const SampledFunction::Node& need(const std::shared_ptr<const SampledFunction::Node>& n) {
    if (!n) throw PreconditionError("SampledFunction: empty function");
    return *n;
}

}  // namespace

SampledFunction SampledFunction::polynomial(std::vector<Exponent> exponents, Vec coeffs) {
    if (exponents.empty()) throw InputError("polynomial: empty exponent list");
    if (coeffs.size() != static_cast<Eigen::Index>(exponents.size()))
        throw InputError("polynomial: coefficient count does not match exponent count");
    const int d = static_cast<int>(exponents[0].size());
    for (const auto& a : exponents) {
        if (static_cast<int>(a.size()) != d) throw InputError("polynomial: exponents of mixed dimension");
        for (int v : a)
            if (v < 0) throw InputError("polynomial: negative exponent");
    }
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::polynomial;
    n->d = d;
    n->exponents = std::move(exponents);
    n->coeffs = std::move(coeffs);
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::ridge_log(int n_level, Point xi) {
    if (n_level < 0) throw InputError("ridge_log: n must be >= 0");
    double nrm = xi.norm();
    if (!(nrm > 0)) throw InputError("ridge_log: xi must be nonzero");
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::ridge_log;
    n->d = static_cast<int>(xi.size());
    n->n = n_level;
    n->xi = xi / nrm;
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::random_poly(int d, int degree, std::uint64_t seed) {
    if (degree < 0) throw InputError("random_poly: degree must be >= 0");
    auto ex = graded_monomials(d, degree);
    Rng rng(seed);
    Vec c(ex.size());
    for (int i = 0; i < c.size(); ++i) c[i] = rng.normal();
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::random_poly;
    n->d = d;
    n->exponents = std::move(ex);
    n->coeffs = std::move(c);
    n->degree = degree;
    n->seed = seed;
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::table(std::vector<Point> points, std::vector<double> values) {
    if (points.empty()) throw InputError("table: no points");
    if (points.size() != values.size()) throw InputError("table: point and value counts differ");
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::table;
    n->d = static_cast<int>(points[0].size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        require_dim(n->d, static_cast<int>(points[i].size()), "table");
        n->lookup[table_key(points[i])] = values[i];
    }
    n->points = std::move(points);
    n->values = std::move(values);
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::callable(int d, std::function<double(const Point&)> fn, std::string label) {
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::callable;
    n->d = d;
    n->fn = std::move(fn);
    n->label = std::move(label);
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::combination(std::vector<double> weights, std::vector<SampledFunction> terms) {
    if (terms.empty() || weights.size() != terms.size()) throw InputError("combination: weights and terms must match");
    const int d = terms[0].dim();
    for (const auto& t : terms) require_dim(d, t.dim(), "combination");
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::combination;
    n->d = d;
    n->weights = std::move(weights);
    n->terms = std::move(terms);
    SampledFunction f;
    f.node_ = n;
    return f;
}

SampledFunction SampledFunction::composition(SampledFunction g, AffineMap map) {
    require_dim(g.dim(), map.dim(), "composition");
    auto n = std::make_shared<Node>();
    n->kind = FunctionKind::composition;
    n->d = map.dim();
    n->terms = {std::move(g)};
    n->map = std::move(map);
    SampledFunction f;
    f.node_ = n;
    return f;
}

double SampledFunction::operator()(const Point& x) const {
    const Node& n = need(node_);
    require_dim(n.d, static_cast<int>(x.size()), "SampledFunction");
    switch (n.kind) {
        case FunctionKind::polynomial:
        case FunctionKind::random_poly: return evaluate_monomials(n.exponents, n.coeffs, x);
        case FunctionKind::ridge_log: {
            double s = x.dot(n.xi);
            if (!(s > std::exp(-static_cast<double>(n.n)))) return -static_cast<double>(n.n);
            return std::log(s);
        }
        case FunctionKind::table: {
            auto it = n.lookup.find(table_key(x));
            if (it == n.lookup.end()) throw PreconditionError("table: evaluation at a point not in the table");
            return it->second;
        }
        case FunctionKind::callable: return n.fn(x);
        case FunctionKind::combination: {
            double s = 0;
            for (std::size_t i = 0; i < n.terms.size(); ++i) s += n.weights[i] * n.terms[i](x);
            return s;
        }
        case FunctionKind::composition: return n.terms[0](n.map.apply(x));
    }
    return 0;
}

int SampledFunction::dim() const { return need(node_).d; }
FunctionKind SampledFunction::kind() const { return need(node_).kind; }
const std::vector<Exponent>& SampledFunction::exponents() const { return need(node_).exponents; }
const Vec& SampledFunction::coeffs() const { return need(node_).coeffs; }
int SampledFunction::ridge_n() const { return need(node_).n; }
const Point& SampledFunction::ridge_xi() const { return need(node_).xi; }
int SampledFunction::degree() const { return need(node_).degree; }
std::uint64_t SampledFunction::seed() const { return need(node_).seed; }
const std::vector<Point>& SampledFunction::table_points() const { return need(node_).points; }
const std::vector<double>& SampledFunction::table_values() const { return need(node_).values; }
const std::vector<double>& SampledFunction::weights() const { return need(node_).weights; }
const std::vector<SampledFunction>& SampledFunction::terms() const { return need(node_).terms; }
const AffineMap& SampledFunction::map() const { return need(node_).map; }

std::string SampledFunction::describe() const {
    const Node& n = need(node_);
    std::ostringstream os;
    switch (n.kind) {
        case FunctionKind::polynomial: os << "polynomial(" << n.exponents.size() << " terms)"; break;
        case FunctionKind::ridge_log: os << "ridge_log(n=" << n.n << ")"; break;
        case FunctionKind::random_poly: os << "random_poly(degree=" << n.degree << ",seed=" << n.seed << ")"; break;
        case FunctionKind::table: os << "table(" << n.points.size() << ")"; break;
        case FunctionKind::callable: os << n.label; break;
        case FunctionKind::combination: {
            os << "combination(";
            for (std::size_t i = 0; i < n.terms.size(); ++i) os << (i ? "," : "") << n.weights[i] << "*" << n.terms[i].describe();
            os << ")";
            break;
        }
        case FunctionKind::composition: os << "composition(" << n.terms[0].describe() << ")"; break;
    }
    return os.str();
}

double binomial(int n, int k) {
    // Pascal rows up to 64 are cached; the values are exact in double there.
    static const std::vector<std::vector<double>> pascal = [] {
        std::vector<std::vector<double>> t(65);
        for (int i = 0; i <= 64; ++i) {
            t[i].assign(i + 1, 1.0);
            for (int j = 1; j < i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
        return t;
    }();
    if (k < 0 || k > n) return 0;
    if (n <= 64) return pascal[n][k];
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

double finite_difference(const SampledFunction& f, const Point& x, const Point& h, int r) {
    if (r < 0) throw PreconditionError("finite_difference: order must be >= 0");
    double s = 0;
    for (int j = 0; j <= r; ++j) {
        double c = binomial(r, j);
        if ((r + j) % 2) c = -c;
        s += c * f(x + j * h);
    }
    return s;
}

std::vector<int> shift_domain(const Domain& dom, const SamplePlan& plan, const Point& h, int r) {
    require_dim(dom.dim(), static_cast<int>(h.size()), "shift_domain");
    std::vector<int> out;
    for (std::size_t i = 0; i < plan.points.size(); ++i) {
        bool ok = true;
        for (int j = 1; j <= r && ok; ++j) ok = dom.contains(plan.points[i] + j * h);
        if (ok) out.push_back(static_cast<int>(i));
    }
    return out;
}

namespace {

// Fixed-order pairwise summation.
double pairwise(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t m = n / 2;
    return pairwise(v, m) + pairwise(v + m, n - m);
}

}  // namespace

double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p, bool* empty) {
    if (values.size() != weights.size()) throw DimensionError("lp_norm: values and weights differ in length");
    if (!(p > 0)) throw PreconditionError("lp_norm: p must be positive");
    if (empty) *empty = values.empty();
    if (values.empty()) return 0;
    double m = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] >= 0)) throw PreconditionError("lp_norm: weights must be nonnegative");
        if (weights[i] > 0 || std::isinf(p)) m = std::max(m, std::abs(values[i]));
    }
    if (std::isinf(p) || m == 0 || std::isinf(m)) return m;
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) terms[i] = weights[i] * std::pow(std::abs(values[i]) / m, p);
    return m * std::pow(pairwise(terms.data(), terms.size()), 1.0 / p);
}

namespace {

struct ShiftEval {
    double value = 0;
    int count = 0;
};

ShiftEval eval_shift(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const Point& xi, int r, double u,
                     double p) {
    Point h = u * xi;
    auto idx = shift_domain(dom, plan, h, r);
    std::vector<double> v(idx.size()), w(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        v[k] = finite_difference(f, plan.points[idx[k]], h, r);
        w[k] = plan.weights[idx[k]];
    }
    return {lp_norm(v, w, p), static_cast<int>(idx.size())};
}

// Longest forward chord from a plan point along e; inf when the domain has no exact line intersection.
double forward_reach(const Domain& dom, const SamplePlan& plan, const Point& e) {
    double reach = 0;
    for (const auto& x : plan.points) {
        auto iv = line_interval(dom, x, e);
        if (!iv) return kInf;
        if (!iv->empty() && iv->lo <= 0) reach = std::max(reach, iv->hi);
    }
    return reach;
}

}  // namespace

ModulusResult directional_modulus(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const Point& xi,
                                  int r, double t, double p, const ModulusOptions& opt) {
    require_dim(dom.dim(), static_cast<int>(xi.size()), "directional_modulus");
    require_dim(dom.dim(), f.dim(), "directional_modulus");
    if (!(t > 0)) throw PreconditionError("directional_modulus: t must be positive");
    if (plan.points.empty()) throw PreconditionError("directional_modulus: empty sample plan");
    if (r < 1) throw PreconditionError("directional_modulus: order must be >= 1");
    if (!(p > 0)) throw PreconditionError("directional_modulus: p must be positive");
    Point e = xi / xi.norm();

    std::vector<double> us;
    if (opt.grid_step > 0) {
        for (long k = 1; k * opt.grid_step <= t * (1 + 1e-12); ++k) us.push_back(k * opt.grid_step);
    } else {
        if (opt.n_shift < 1) throw PreconditionError("directional_modulus: n_shift must be >= 1");
        double top = t;
        if (opt.cap_to_reach && dom.convex()) top = std::min(t, forward_reach(dom, plan, e) / r);
        if (!(top > 1e-9 * t)) top = t;
        for (int k = 1; k <= opt.n_shift; ++k) us.push_back(top * k / opt.n_shift);
    }
    std::vector<ShiftEval> ev(us.size());
    parallel_for(us.size(), [&](std::size_t k) { ev[k] = eval_shift(f, dom, plan, e, r, us[k], p); });

    ModulusResult res;
    res.xi = e;
    res.empty = true;
    int best = -1;
    for (std::size_t k = 0; k < us.size(); ++k) {
        if (ev[k].count > 0) res.empty = false;
        if (ev[k].count > 0 && (best < 0 || ev[k].value > ev[best].value)) best = static_cast<int>(k);
    }
    if (best < 0) {
        res.empty = true;
        return res;
    }
    res.value = ev[best].value;
    res.u = us[best];
    res.n_valid_points = ev[best].count;

    if (std::isinf(p) && opt.refine && us.size() > 1) {
        std::vector<int> order(us.size());
        for (std::size_t k = 0; k < us.size(); ++k) order[k] = static_cast<int>(k);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ev[a].value > ev[b].value; });
        const double du = us.size() > 1 ? us[1] - us[0] : t;
        const double tol = 1e-4 * t;
        const double g = (std::sqrt(5.0) - 1) / 2;
        for (int q = 0; q < std::min<int>(3, static_cast<int>(order.size())); ++q) {
            const int k = order[q];
            if (ev[k].count == 0) continue;
            double a = std::max(us[k] - du, 1e-12 * t), b = std::min(us[k] + du, t);
            auto consider = [&](double u) {
                ShiftEval s = eval_shift(f, dom, plan, e, r, u, p);
                if (s.count > 0 && s.value > res.value) {
                    res.value = s.value;
                    res.u = u;
                    res.n_valid_points = s.count;
                }
                return s.count > 0 ? s.value : -kInf;
            };
            double c = b - g * (b - a), d = a + g * (b - a);
            double fc = consider(c), fd = consider(d);
            while (b - a > tol) {
                if (fc >= fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - g * (b - a);
                    fc = consider(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + g * (b - a);
                    fd = consider(d);
                }
            }
        }
    }
    res.reliable = res.n_valid_points >= opt.min_points;
    return res;
}

ModulusResult set_modulus(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const DirectionSet& E, int r,
                          double t, double p, const ModulusOptions& opt) {
    if (E.size() == 0) throw PreconditionError("set_modulus: empty direction set");
    ModulusResult best;
    bool all_empty = true;
    for (int i = 0; i < E.size(); ++i) {
        ModulusResult m = directional_modulus(f, dom, plan, E.dirs[i], r, t, p, opt);
        m.xi_index = i;
        all_empty = all_empty && m.empty;
        if (best.xi_index < 0 || m.value > best.value) best = m;
    }
    best.empty = all_empty;
    return best;
}

double sup_on_plan(const SampledFunction& f, const SamplePlan& plan) {
    double m = 0;
    for (const auto& x : plan.points) m = std::max(m, std::abs(f(x)));
    return m;
}

}  // namespace wlab
