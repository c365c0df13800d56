#include "wlab/whitney.hpp"

#include "wlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wlab {

namespace {

double theta_of(double p) { return std::min(p, 1.0); }

RatioResult ratio_at(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const DirectionSet& E,
                     const PolySpaceBasis& basis, int r, double p, double t, const WhitneyOptions& opt) {
    RatioResult out;
    out.t = t;
    out.mod = set_modulus(f, dom, plan, E, r, t, p, opt.modulus);
    out.modulus = out.mod.value;
    double scale = sup_on_plan(f, plan);
    if (!(scale > 0) || out.modulus <= opt.undefined_below * scale) return out;
    out.approx = best_approx(f, dom, plan, basis, p, opt.approx);
    out.error = out.approx.error;
    out.ratio = out.error / out.modulus;
    out.defined = true;
    return out;
}

}  // namespace

RatioResult whitney_ratio(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const DirectionSet& E,
                          const PolySpaceBasis& basis, int r, double p, const WhitneyOptions& opt) {
    if (basis.r != r) throw PreconditionError("whitney_ratio: basis order differs from r");
    require_dim(dom.dim(), basis.d, "whitney_ratio");
    return ratio_at(f, dom, plan, E, basis, r, p, diameter(dom).value, opt);
}

const char* to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::random_poly: return "random_poly";
        case FamilyKind::ridge_log: return "ridge_log";
        case FamilyKind::perturbed_basis: return "perturbed_basis";
        case FamilyKind::list: return "list";
    }
    return "unknown";
}

std::vector<SampledFunction> family_members(const FamilySpec& fam, int d, int r, const PolySpaceBasis* basis) {
    std::vector<SampledFunction> out;
    switch (fam.kind) {
        case FamilyKind::random_poly: {
            int deg = fam.degree >= 0 ? fam.degree : d * (r - 1) + 3;
            for (int i = 0; i < fam.size; ++i) out.push_back(SampledFunction::random_poly(d, deg, Rng::derive(fam.seed, i)));
            break;
        }
        case FamilyKind::ridge_log: {
            Point xi = fam.xi.size() ? fam.xi : Point(Point::Unit(d, d - 1));
            require_dim(d, static_cast<int>(xi.size()), "family_members");
            for (int n : fam.ns) out.push_back(SampledFunction::ridge_log(n, xi));
            break;
        }
        case FamilyKind::perturbed_basis: {
            if (!basis) throw PreconditionError("family_members: perturbed_basis needs the basis");
            auto exps = graded_monomials(d, r);
            for (int i = 0; i < fam.size; ++i) {
                Rng rng(Rng::derive(fam.seed, i));
                Vec c(basis->size());
                for (int k = 0; k < c.size(); ++k) c[k] = rng.normal();
                Vec mono = c.size() ? to_monomial(*basis, c) : Vec::Zero(basis->n_monomials());
                // pad to degree r, then add a random degree-r part
                Vec coeffs = Vec::Zero(static_cast<int>(exps.size()));
                for (int k = 0; k < mono.size(); ++k) {
                    auto it = std::find(exps.begin(), exps.end(), basis->exponents[k]);
                    coeffs[it - exps.begin()] += mono[k];
                }
                for (std::size_t k = 0; k < exps.size(); ++k)
                    if (total_degree(exps[k]) == r) coeffs[static_cast<int>(k)] += fam.perturbation * rng.normal();
                out.push_back(SampledFunction::polynomial(exps, coeffs));
            }
            break;
        }
        case FamilyKind::list: out = fam.functions; break;
    }
    for (const auto& f : out) require_dim(d, f.dim(), "family_members");
    return out;
}

WhitneyEstimate empirical_whitney_constant(const Domain& dom, const SamplePlan& plan, const DirectionSet& E, int r,
                                           double p, const FamilySpec& family, int budget, const WhitneyOptions& opt) {
    const int d = dom.dim();
    PolySpaceBasis basis = build_basis(d, r, E);
    auto members = family_members(family, d, r, &basis);
    if (budget > 0 && static_cast<int>(members.size()) > budget) members.resize(budget);
    if (members.empty()) throw PreconditionError("empirical_whitney_constant: empty family");
    const double t = diameter(dom).value;

    WhitneyEstimate est;
    est.r = r;
    est.p = p;
    est.theta = theta_of(p);
    est.n_tried = static_cast<int>(members.size());
    est.ratios.assign(members.size(), std::nullopt);
    parallel_for(members.size(), [&](std::size_t i) {
        RatioResult rr = ratio_at(members[i], dom, plan, E, basis, r, p, t, opt);
        if (rr.defined) est.ratios[i] = rr.ratio;
    });
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!est.ratios[i]) continue;
        ++est.n_defined;
        if (est.witness < 0 || *est.ratios[i] > est.lower_bound) {
            est.lower_bound = *est.ratios[i];
            est.witness = static_cast<int>(i);
        }
    }
    if (est.n_defined == 0)
        throw PreconditionError("empirical_whitney_constant: no defined ratios (every member has zero modulus)");
    est.witness_spec = members[est.witness].describe();
    return est;
}

void attach_upper_bound(WhitneyEstimate& est, double upper, double tol) {
    est.upper_bound = upper;
    est.consistent = est.lower_bound <= upper * (1 + tol) + tol;
}

ChainBound chain_upper_bound(int m, int r, double w0, double p) {
    if (m < 0) throw PreconditionError("chain_upper_bound: m must be >= 0");
    if (r < 1) throw PreconditionError("chain_upper_bound: r must be >= 1");
    if (!(w0 >= 0)) throw PreconditionError("chain_upper_bound: w0 must be >= 0");
    if (!(p > 0)) throw PreconditionError("chain_upper_bound: p must be positive");
    ChainBound out;
    out.m = m;
    out.r = r;
    out.w0 = w0;
    out.p = p;
    out.theta = theta_of(p);
    const double two_r = std::ldexp(1.0, r);
    double w = std::pow(w0, out.theta);
    for (int k = 1; k <= m && std::isfinite(w); ++k) w = 1 + two_r * w;
    const double g = std::ldexp(1.0, m * r);  // inf when m r is huge
    double closed = g * std::pow(w0, out.theta) + (g - 1) / (two_r - 1);
    out.recursion = std::pow(w, 1 / out.theta);
    out.closed_form = std::pow(closed, 1 / out.theta);
    out.overflow = !std::isfinite(out.recursion) || !std::isfinite(out.closed_form);
    if (out.overflow) out.recursion = out.closed_form = kInf;
    return out;
}

ChainBound chain_upper_bound(const VerifiedChain& chain, double w0, double p, const std::string& w0_assumption) {
    if (!chain.report.ok) {
        std::ostringstream os;
        os << "chain_upper_bound: chain did not verify (" << chain.report.bad_pieces.size() << " bad pieces, worst violation "
           << chain.report.worst_violation << ")";
        throw PreconditionError(os.str());
    }
    ChainBound out = chain_upper_bound(chain.chain.m(), chain.chain.r, w0, p);
    out.w0_assumption = w0_assumption.empty() ? "w_r(E_0;E)_p <= w0 assumed" : w0_assumption;
    return out;
}

double LengthFactor::times_length(double L) const { return std::pow(L, exponent); }

LengthFactor length_factor(int r, double p) {
    if (r < 1 || !(p > 0)) throw PreconditionError("length_factor: need r >= 1 and p > 0");
    LengthFactor f;
    f.exponent = r - 1 + (std::isinf(p) ? 0.0 : 2 / p);
    std::ostringstream os;
    os.precision(17);
    os << "C_{p,r} * L^" << f.exponent << " (C_{p,r} unknown)";
    f.text = os.str();
    return f;
}

Domain counterexample_body(int d, const Point& xi, double eps) {
    require_dim(d, static_cast<int>(xi.size()), "counterexample_body");
    if (!(eps > 0 && eps < 1)) throw PreconditionError("counterexample_body: eps must lie in (0, 1)");
    double n = xi.norm();
    if (!(n > 0)) throw PreconditionError("counterexample_body: xi must be nonzero");
    return Domain::cone_body(xi / n, eps);
}

double divergence_floor(int n, int d, int r) {
    const double q = std::ldexp(1.0, d * r);
    return (n - q * std::log(static_cast<double>(d * r))) / q;
}

Certificate counterexample_certificate(int d, const Point& xi_in, double eps, const DirectionSet& E, int r,
                                       const std::vector<int>& ns, const CertificateOptions& opt) {
    Domain K = counterexample_body(d, xi_in, eps);
    require_dim(d, E.dim(), "counterexample_certificate");
    if (ns.empty()) throw PreconditionError("counterexample_certificate: empty n list");
    const Point xi = xi_in / xi_in.norm();
    Certificate cert;
    cert.d = d;
    cert.r = r;
    cert.eps = eps;
    cert.xi = xi;
    double top = -kInf;
    for (const auto& e : E.symmetrized().dirs) top = std::max(top, e.dot(xi));
    cert.margin = 1 - top;
    if (!(cert.margin > eps)) {
        std::ostringstream os;
        os << "counterexample_certificate: margin condition fails, max over E u -E of eta.xi = " << top
           << " leaves delta = " << cert.margin << " <= eps = " << eps;
        throw PreconditionError(os.str());
    }

    SamplePlan plan = make_plan(K, opt.density, opt.seed);
    // the stencil of the floor argument: jh, h = xi/(dr)
    const int q = d * r;
    const double w = plan.points.empty() ? 0 : plan.weights[0];
    for (int j = 0; j <= q; ++j) plan.add_point(static_cast<double>(j) / q * xi, w);

    PolySpaceBasis basis = build_basis(d, r, E);
    const double t = diameter(K).value;
    cert.rows.resize(ns.size());
    parallel_for(ns.size(), [&](std::size_t i) {
        CertificateRow& row = cert.rows[i];
        row.n = ns[i];
        SampledFunction f = SampledFunction::ridge_log(ns[i], xi);
        ModulusResult mr = set_modulus(f, K, plan, E, r, t, kInf, opt.whitney.modulus);
        row.modulus = mr.value;
        row.modulus_reliable = mr.reliable;
        row.floor = divergence_floor(ns[i], d, r);
        row.numeric_er = best_approx(f, K, plan, basis, kInf, opt.whitney.approx).error;
        row.growth_certified = row.numeric_er >= row.floor - 1e-6;
    });
    std::size_t first = static_cast<std::size_t>(std::min_element(ns.begin(), ns.end()) - ns.begin());
    double base = cert.rows[first].modulus, mx = 0;
    for (const auto& row : cert.rows) mx = std::max(mx, row.modulus);
    cert.modulus_ratio = base > 0 ? mx / base : kInf;
    cert.modulus_bounded = cert.modulus_ratio <= 2;
    return cert;
}

}  // namespace wlab
