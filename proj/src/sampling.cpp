#include "wlab/geometry.hpp"

#include "wlab/lp.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

std::vector<Point> sample_points(const Domain& dom, int n, Rng& rng, long max_attempts) {
    const Box& bb = dom.bbox();
    const int d = dom.dim();
    if (max_attempts <= 0) max_attempts = 2000L * n + 200000;
    std::vector<Point> out;
    out.reserve(n);
    if (bb.empty()) return out;
    Point x(d);
    for (long a = 0; a < max_attempts && static_cast<int>(out.size()) < n; ++a) {
        for (int i = 0; i < d; ++i) x[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * rng.uniform();
        if (dom.contains(x)) out.push_back(x);
    }
    return out;
}

SamplePlan make_plan(const Domain& dom, int n_points, std::uint64_t seed) {
    if (n_points < 1) throw PreconditionError("make_plan: need at least one point");
    const Box& bb = dom.bbox();
    const int d = dom.dim();
    Rng rng(seed);
    SamplePlan plan;
    plan.dim = d;
    plan.seed = seed;
    long attempts = 0, accepted = 0;
    const long cap = 4000L * n_points + 400000;
    Point x(d);
    while (accepted < n_points && attempts < cap) {
        for (int i = 0; i < d; ++i) x[i] = bb.lo[i] + (bb.hi[i] - bb.lo[i]) * rng.uniform();
        ++attempts;
        if (dom.contains(x)) {
            plan.points.push_back(x);
            ++accepted;
        }
    }
    if (accepted == 0) throw PreconditionError("make_plan: empty domain (no accepted samples)");
    if (accepted < n_points) throw PreconditionError("make_plan: domain too thin for rejection sampling");
    auto ev = dom.exact_volume();
    plan.volume_exact = ev.has_value();
    plan.volume = ev ? *ev : bb.volume() * static_cast<double>(accepted) / static_cast<double>(attempts);
    double w = plan.volume / static_cast<double>(accepted);
    plan.weights.assign(plan.points.size(), w);
    plan.density = static_cast<double>(accepted) / plan.volume;
    return plan;
}

SamplePlan grid_plan(const Domain& dom, int per_axis) {
    if (per_axis < 2) throw PreconditionError("grid_plan: need at least 2 points per axis");
    const int d = dom.dim();
    const Box& bb = dom.bbox();
    // undo the bounding-box padding so lattice ends sit on the body
    Point lo = bb.lo, hi = bb.hi;
    if (dom.kind() == DomainKind::polytope) {
        auto verts = polytope_vertices(dom);
        lo = verts[0];
        hi = verts[0];
        for (const auto& v : verts) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
    }
    SamplePlan plan;
    plan.dim = d;
    std::vector<int> idx(d, 0);
    long total = 0;
    Point x(d);
    for (;;) {
        for (int i = 0; i < d; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (per_axis - 1.0);
        ++total;
        if (dom.contains(x)) plan.points.push_back(x);
        int k = 0;
        while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
        if (k == d) break;
    }
    if (plan.points.empty()) throw PreconditionError("grid_plan: empty domain");
    auto ev = dom.exact_volume();
    plan.volume_exact = ev.has_value();
    plan.volume = ev ? *ev : Box{lo, hi}.volume() * static_cast<double>(plan.points.size()) / total;
    plan.weights.assign(plan.points.size(), plan.volume / static_cast<double>(plan.points.size()));
    plan.density = static_cast<double>(plan.points.size()) / plan.volume;
    return plan;
}

SamplePlan transform_plan(const SamplePlan& plan, const AffineMap& map) {
    require_dim(plan.dim, map.dim(), "transform_plan");
    SamplePlan out = plan;
    double j = std::abs(map.det);
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        out.points[i] = map.apply(plan.points[i]);
        out.weights[i] = plan.weights[i] * j;
    }
    out.volume = plan.volume * j;
    out.density = plan.density / j;
    return out;
}

// ---------------------------------------------------------------- diameter

namespace {

DiameterResult max_pair(const std::vector<Point>& pts) {
    DiameterResult r;
    r.value = 0;
    r.a = pts[0];
    r.b = pts[0];
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double v = (pts[i] - pts[j]).norm();
            if (v > r.value) {
                r.value = v;
                r.a = pts[i];
                r.b = pts[j];
            }
        }
    return r;
}

}  // namespace

DiameterResult diameter(const Domain& dom, const SamplePlan& plan) {
    switch (dom.kind()) {
        case DomainKind::polytope: {
            auto verts = polytope_vertices(dom);
            if (verts.empty()) throw PreconditionError("diameter: empty domain");
            return max_pair(verts);
        }
        case DomainKind::ball: {
            const auto& b = dom.as_ball();
            DiameterResult r;
            r.value = 2 * b.radius;
            r.a = b.center;
            r.b = b.center;
            r.a[0] -= b.radius;
            r.b[0] += b.radius;
            return r;
        }
        case DomainKind::cone_body: {
            const auto& c = dom.as_cone_body();
            double k = 1 - c.eps;
            double rim = std::sqrt(std::max(0.0, 1.0 / (k * k) - 1.0));
            DiameterResult r;
            const int d = dom.dim();
            // a unit vector orthogonal to xi
            Point perp = Point::Zero(d);
            if (d > 1) {
                int j = 0;
                for (int i = 1; i < d; ++i)
                    if (std::abs(c.xi[i]) < std::abs(c.xi[j])) j = i;
                perp[j] = 1;
                perp -= perp.dot(c.xi) * c.xi;
                perp.normalize();
            }
            double apex_rim = std::sqrt(1 + rim * rim);
            if (d > 1 && 2 * rim > apex_rim) {
                r.value = 2 * rim;
                r.a = c.xi + rim * perp;
                r.b = c.xi - rim * perp;
            } else {
                r.value = apex_rim;
                r.a = Point::Zero(d);
                r.b = c.xi + rim * perp;
            }
            return r;
        }
        default: break;
    }
    if (plan.points.empty()) throw PreconditionError("diameter: empty plan");
    // support points along many directions, then sweeps from each candidate
    const int d = dom.dim();
    Rng rng(plan.seed ^ 0xd1a3);
    std::vector<Point> cand;
    std::vector<Point> dirs;
    for (int i = 0; i < d; ++i) {
        Point e = Point::Zero(d);
        e[i] = 1;
        dirs.push_back(e);
    }
    for (int k = 0; k < 64; ++k) dirs.push_back(rng.unit_vector(d));
    for (const auto& u : dirs) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < plan.points.size(); ++i) {
            double s = plan.points[i].dot(u);
            if (s < plan.points[lo].dot(u)) lo = i;
            if (s > plan.points[hi].dot(u)) hi = i;
        }
        cand.push_back(plan.points[lo]);
        cand.push_back(plan.points[hi]);
    }
    DiameterResult best = max_pair(cand);
    for (const auto& c : cand)
        for (const auto& p : plan.points) {
            double v = (c - p).norm();
            if (v > best.value) {
                best.value = v;
                best.a = c;
                best.b = p;
            }
        }
    if (plan.points.size() <= 2048) {
        DiameterResult full = max_pair(plan.points);
        if (full.value > best.value) best = full;
    }
    best.approximate = true;
    return best;
}

DiameterResult diameter(const Domain& dom) {
    if (dom.kind() == DomainKind::polytope || dom.kind() == DomainKind::ball || dom.kind() == DomainKind::cone_body)
        return diameter(dom, SamplePlan{});
    return diameter(dom, make_plan(dom, 4096, 7));
}

// ---------------------------------------------------------------- inscribed ball / normalize

InscribedBall inscribed_ball(const Domain& poly) {
    const auto& p = poly.as_polytope();
    const int d = poly.dim();
    const int m = static_cast<int>(p.A.rows());
    Mat L(m, d + 1);
    L.leftCols(d) = p.A;
    L.col(d) = p.row_norm;
    Vec c = Vec::Zero(d + 1);
    c[d] = -1;
    LpResult res = solve_lp(L, p.b, c);
    if (res.status == LpStatus::infeasible) throw PreconditionError("inscribed_ball: infeasible polytope");
    if (res.status == LpStatus::unbounded) throw PreconditionError("inscribed_ball: unbounded polytope");
    if (res.status != LpStatus::optimal) throw ConvergenceError("inscribed_ball: LP did not converge");
    InscribedBall out;
    out.center = res.x.head(d);
    out.radius = res.x[d];
    if (!(out.radius > 0)) throw PreconditionError("inscribed_ball: empty interior");
    return out;
}

namespace {

// Smallest ball whose boundary passes through all of `support` (|support| <= d+1).
bool circumball(const std::vector<Point>& support, Point& c, double& r2) {
    const std::size_t k = support.size();
    if (k == 0) return false;
    const Point& p0 = support[0];
    if (k == 1) {
        c = p0;
        r2 = 0;
        return true;
    }
    const int m = static_cast<int>(k - 1);
    Mat G(m, m);
    Vec rhs(m);
    for (int i = 0; i < m; ++i) {
        Point ui = support[i + 1] - p0;
        rhs[i] = 0.5 * ui.squaredNorm();
        for (int j = 0; j < m; ++j) G(i, j) = ui.dot(support[j + 1] - p0);
    }
    Eigen::FullPivLU<Mat> lu(G);
    if (lu.rank() < m) return false;
    Vec lam = lu.solve(rhs);
    c = p0;
    for (int i = 0; i < m; ++i) c += lam[i] * (support[i + 1] - p0);
    r2 = (c - p0).squaredNorm();
    return true;
}

void welzl(std::vector<Point>& pts, std::size_t n, std::vector<Point>& support, int d, Point& c, double& r2) {
    if (n == 0 || static_cast<int>(support.size()) == d + 1) {
        if (!circumball(support, c, r2)) {
            c = support.empty() ? Point::Zero(d) : support[0];
            r2 = support.empty() ? -1 : 0;
        }
        return;
    }
    Point p = pts[n - 1];
    welzl(pts, n - 1, support, d, c, r2);
    if (r2 >= 0 && (p - c).squaredNorm() <= r2 * (1 + 1e-12) + 1e-24) return;
    support.push_back(p);
    welzl(pts, n - 1, support, d, c, r2);
    support.pop_back();
    // move-to-front keeps the recursion shallow on later calls
    std::rotate(pts.begin(), pts.begin() + static_cast<long>(n) - 1, pts.begin() + static_cast<long>(n));
}

}  // namespace

double enclosing_radius(std::vector<Point> pts, Point* center) {
    if (pts.empty()) return 0;
    const int d = static_cast<int>(pts[0].size());
    Rng rng(99);
    for (std::size_t i = pts.size(); i > 1; --i) std::swap(pts[i - 1], pts[rng.index(i)]);
    std::vector<Point> support;
    Point c;
    double r2 = -1;
    welzl(pts, pts.size(), support, d, c, r2);
    if (center) *center = c;
    return std::sqrt(std::max(0.0, r2));
}

Normalization normalize(const Domain& poly) {
    InscribedBall ib = inscribed_ball(poly);
    const int d = poly.dim();
    double scale = std::max(1.0, poly.bbox().max_extent());
    Normalization out;
    if (ib.center.norm() <= 1e-12 * scale && std::abs(ib.radius - 1) <= 1e-12) {
        out.map = AffineMap::identity(d);
        out.normalized = poly;
    } else {
        out.map = AffineMap::make(Mat::Identity(d, d) / ib.radius, -ib.center / ib.radius);
        out.normalized = image(poly, out.map);
    }
    auto verts = polytope_vertices(out.normalized);
    out.R = std::max(1.0, enclosing_radius(verts, nullptr));
    double r0 = 0;
    for (const auto& v : verts) r0 = std::max(r0, v.norm());
    out.R_origin = std::max(1.0, r0);
    return out;
}

}  // namespace wlab
