#include "wlab/geometry.hpp"

#include "wlab/lp.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

// ---------------------------------------------------------------- Box

double Box::volume() const {
    double v = 1;
    for (int i = 0; i < dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
    return v;
}

bool Box::contains(const Point& x, double slack) const {
    for (int i = 0; i < dim(); ++i)
        if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
    return true;
}

bool Box::intersects(const Box& o) const {
    for (int i = 0; i < dim(); ++i)
        if (o.hi[i] < lo[i] || o.lo[i] > hi[i]) return false;
    return true;
}

Box Box::hull(const Box& a, const Box& b) { return Box{a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)}; }
Box Box::meet(const Box& a, const Box& b) { return Box{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)}; }

// ---------------------------------------------------------------- AffineMap

AffineMap AffineMap::make(const Mat& M, const Point& shift) {
    if (M.rows() != M.cols() || M.rows() != shift.size()) throw DimensionError("AffineMap: shape mismatch");
    AffineMap m;
    m.M = M;
    m.shift = shift;
    Eigen::FullPivLU<Mat> lu(M);
    m.det = lu.determinant();
    double scale = std::max(1e-300, M.cwiseAbs().maxCoeff());
    if (!lu.isInvertible() || std::abs(m.det) <= 1e-14 * std::pow(scale, static_cast<double>(M.rows())))
        throw PreconditionError("AffineMap: matrix is not invertible");
    m.Minv = lu.inverse();
    return m;
}

AffineMap AffineMap::identity(int d) { return make(Mat::Identity(d, d), Point::Zero(d)); }
AffineMap AffineMap::scaling(int d, double s) { return make(s * Mat::Identity(d, d), Point::Zero(d)); }

Point AffineMap::apply(const Point& x) const {
    Point y = M * x;
    return y + shift;
}
Point AffineMap::inverse(const Point& y) const {
    Point t = y - shift;
    return Minv * t;
}
Point AffineMap::linear(const Point& v) const { return M * v; }
Point AffineMap::linear_inverse(const Point& v) const { return Minv * v; }

AffineMap AffineMap::inverse_map() const {
    Point s = -(Minv * shift);
    return make(Minv, s);
}

AffineMap AffineMap::then(const AffineMap& outer) const {
    Point s = outer.M * shift + outer.shift;
    return make(outer.M * M, s);
}

double AffineMap::condition_number() const {
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    return s[0] / s[s.size() - 1];
}

const char* to_string(DomainKind k) {
    switch (k) {
        case DomainKind::polytope: return "polytope";
        case DomainKind::ball: return "ball";
        case DomainKind::cone_body: return "cone_body";
        case DomainKind::union_of: return "union";
        case DomainKind::intersection: return "intersection";
        case DomainKind::affine_image: return "affine_image";
        case DomainKind::sweep: return "sweep";
    }
    return "unknown";
}

// ---------------------------------------------------------------- Domain

struct Domain::Node {
    DomainKind kind;
    int dim = 0;
    Box bbox;
    bool convex = true;
    double slack = 0;  // bbox prefilter slack
    std::variant<PolytopeRep, BallRep, ConeBodyRep, SetListRep, AffineRep, SweepRep> rep;
    Mat At;  // polytope rows as columns
};

namespace {

constexpr double kSlack = 1e-12;

double ball_volume(int k, double rho) {
    return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0) * std::pow(rho, k);
}

bool check_finite(const Point& x) {
    for (int i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) return false;
    return true;
}

}  // namespace

Domain Domain::polytope(const Mat& A, const Vec& b) {
    if (A.rows() != b.size()) throw DimensionError("polytope: A and b sizes differ");
    if (A.cols() < 1 || A.cols() > kMaxDim) throw DimensionError("polytope: unsupported dimension");
    if (!A.allFinite() || !b.allFinite()) throw InputError("polytope: non-finite data");
    const int d = static_cast<int>(A.cols());
    std::vector<int> keep;
    for (int i = 0; i < A.rows(); ++i) {
        double nrm = A.row(i).norm();
        if (nrm == 0) {
            if (b[i] < 0) throw PreconditionError("polytope: infeasible zero row");
            continue;
        }
        keep.push_back(i);
    }
    PolytopeRep rep;
    rep.A.resize(static_cast<int>(keep.size()), d);
    rep.b.resize(static_cast<int>(keep.size()));
    rep.row_norm.resize(static_cast<int>(keep.size()));
    for (int k = 0; k < static_cast<int>(keep.size()); ++k) {
        rep.A.row(k) = A.row(keep[k]);
        rep.b[k] = b[keep[k]];
        rep.row_norm[k] = A.row(keep[k]).norm();
    }

    // Chebyshev radius doubles as the feasibility and interior check.
    {
        const int m = static_cast<int>(rep.A.rows());
        Mat L(m + 1, d + 1);
        Vec u(m + 1);
        L.topLeftCorner(m, d) = rep.A;
        L.topRightCorner(m, 1) = rep.row_norm;
        u.head(m) = rep.b;
        L.row(m).setZero();
        L(m, d) = 1;
        u[m] = 1e12;
        Vec c = Vec::Zero(d + 1);
        c[d] = -1;
        LpResult res = solve_lp(L, u, c);
        if (res.status != LpStatus::optimal) throw ConvergenceError("polytope: Chebyshev LP failed");
        double rho = res.x[d];
        if (rho >= 1e11) throw PreconditionError("polytope: unbounded (contains arbitrarily large balls)");
        double bscale = std::max(1.0, rep.b.cwiseAbs().maxCoeff());
        if (rho <= 1e-12 * bscale) throw PreconditionError("polytope: empty interior (Chebyshev radius 0)");
    }

    Point lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        for (int s : {1, -1}) {
            Vec c = Vec::Zero(d);
            c[k] = s;
            LpResult res = solve_lp(rep.A, rep.b, c);
            if (res.status == LpStatus::unbounded) throw PreconditionError("polytope: unbounded");
            if (res.status != LpStatus::optimal) throw ConvergenceError("polytope: bounding-box LP failed");
            if (s == 1)
                lo[k] = res.objective;
            else
                hi[k] = -res.objective;
        }
    }
    double pad = 1e-9 * std::max(1.0, (hi - lo).maxCoeff());
    lo.array() -= pad;
    hi.array() += pad;

    auto n = std::make_shared<Node>();
    n->kind = DomainKind::polytope;
    n->dim = d;
    n->bbox = Box{lo, hi};
    n->convex = true;
    n->At = rep.A.transpose();
    n->rep = std::move(rep);
    return Domain(std::move(n));
}

std::optional<Domain> try_polytope(const Mat& A, const Vec& b) {
    try {
        return Domain::polytope(A, b);
    } catch (const PreconditionError&) {
        return std::nullopt;
    }
}

Domain Domain::box(const Point& lo, const Point& hi) {
    const int d = static_cast<int>(lo.size());
    require_dim(d, static_cast<int>(hi.size()), "box");
    Mat A = Mat::Zero(2 * d, d);
    Vec b(2 * d);
    for (int i = 0; i < d; ++i) {
        A(2 * i, i) = 1;
        b[2 * i] = hi[i];
        A(2 * i + 1, i) = -1;
        b[2 * i + 1] = -lo[i];
    }
    return polytope(A, b);
}

Domain Domain::convex_polygon(const std::vector<Point>& vertices) {
    std::vector<Point> hull = convex_hull_2d(vertices);
    if (hull.size() < 3) throw PreconditionError("convex_polygon: fewer than 3 hull vertices");
    const int m = static_cast<int>(hull.size());
    Mat A(m, 2);
    Vec b(m);
    for (int k = 0; k < m; ++k) {
        const Point& p = hull[k];
        const Point& q = hull[(k + 1) % m];
        double ex = q[0] - p[0], ey = q[1] - p[1];
        double nrm = std::hypot(ex, ey);
        A(k, 0) = ey / nrm;
        A(k, 1) = -ex / nrm;
        b[k] = A(k, 0) * p[0] + A(k, 1) * p[1];
    }
    return polytope(A, b);
}

Domain Domain::ball(const Point& center, double radius) {
    if (center.size() < 1 || center.size() > kMaxDim) throw DimensionError("ball: unsupported dimension");
    if (!(radius > 0) || !std::isfinite(radius)) throw PreconditionError("ball: radius must be positive");
    if (!check_finite(center)) throw InputError("ball: non-finite center");
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::ball;
    n->dim = static_cast<int>(center.size());
    Point r = Point::Constant(n->dim, radius * (1 + 1e-12));
    n->bbox = Box{center - r, center + r};
    n->rep = BallRep{center, radius};
    return Domain(std::move(n));
}

Domain Domain::cone_body(const Point& xi, double eps) {
    if (!(eps > 0 && eps < 1)) throw PreconditionError("cone_body: eps must lie in (0,1)");
    if (xi.size() < 1 || xi.size() > kMaxDim) throw DimensionError("cone_body: unsupported dimension");
    double nrm = xi.norm();
    if (!(nrm > 0)) throw PreconditionError("cone_body: xi must be nonzero");
    Point u = xi / nrm;
    const int d = static_cast<int>(u.size());
    double k = 1 - eps;
    double rim = std::sqrt(std::max(0.0, 1.0 / (k * k) - 1.0));
    Point lo(d), hi(d);
    for (int i = 0; i < d; ++i) {
        double spread = rim * std::sqrt(std::max(0.0, 1 - u[i] * u[i]));
        lo[i] = std::min(0.0, u[i] - spread);
        hi[i] = std::max(0.0, u[i] + spread);
    }
    double pad = 1e-12 * std::max(1.0, (hi - lo).maxCoeff());
    lo.array() -= pad;
    hi.array() += pad;
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::cone_body;
    n->dim = d;
    n->bbox = Box{lo, hi};
    n->rep = ConeBodyRep{u, eps};
    return Domain(std::move(n));
}

Domain Domain::union_of(std::vector<Domain> members) {
    if (members.empty()) throw PreconditionError("union: no members");
    const int d = members[0].dim();
    Box bb = members[0].bbox();
    for (const auto& m : members) {
        require_dim(d, m.dim(), "union");
        bb = Box::hull(bb, m.bbox());
    }
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::union_of;
    n->dim = d;
    n->bbox = bb;
    n->convex = members.size() == 1 && members[0].convex();
    n->rep = SetListRep{std::move(members)};
    return Domain(std::move(n));
}

Domain Domain::intersection(std::vector<Domain> members) {
    if (members.empty()) throw PreconditionError("intersection: no members");
    const int d = members[0].dim();
    // flatten nested intersections so membership stays a flat loop
    std::vector<Domain> flat;
    for (auto& m : members) {
        require_dim(d, m.dim(), "intersection");
        if (m.kind() == DomainKind::intersection) {
            for (const auto& mm : m.as_set_list().members) flat.push_back(mm);
        } else {
            flat.push_back(m);
        }
    }
    // cheap members first
    std::stable_sort(flat.begin(), flat.end(), [](const Domain& a, const Domain& b) {
        auto cost = [](const Domain& x) {
            switch (x.kind()) {
                case DomainKind::ball: return 0;
                case DomainKind::polytope: return 1;
                case DomainKind::cone_body: return 2;
                case DomainKind::affine_image: return 3;
                default: return 4;
            }
        };
        return cost(a) < cost(b);
    });
    Box bb = flat[0].bbox();
    bool convex = true;
    for (const auto& m : flat) {
        bb = Box::meet(bb, m.bbox());
        convex = convex && m.convex();
    }
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::intersection;
    n->dim = d;
    n->bbox = bb;
    n->convex = convex;
    n->rep = SetListRep{std::move(flat)};
    return Domain(std::move(n));
}

Domain Domain::affine_image(const Domain& base, const AffineMap& map) {
    require_dim(base.dim(), map.dim(), "affine_image");
    const Box& b = base.bbox();
    Point c = map.apply(b.center());
    Point half = 0.5 * b.extent();
    Point h = map.M.cwiseAbs() * half;
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::affine_image;
    n->dim = base.dim();
    double pad = 1e-12 * std::max(1.0, h.maxCoeff());
    n->bbox = Box{(c - h).array() - pad, (c + h).array() + pad};
    n->convex = base.convex();
    n->rep = AffineRep{std::make_shared<const Domain>(base), map};
    return Domain(std::move(n));
}

Domain Domain::sweep(const Domain& base, const Point& dir, double t0, double t1) {
    require_dim(base.dim(), static_cast<int>(dir.size()), "sweep");
    if (!(t0 <= t1)) throw PreconditionError("sweep: t0 > t1");
    const Box& b = base.bbox();
    Box a0{b.lo + t0 * dir, b.hi + t0 * dir};
    Box a1{b.lo + t1 * dir, b.hi + t1 * dir};
    auto n = std::make_shared<Node>();
    n->kind = DomainKind::sweep;
    n->dim = base.dim();
    n->bbox = Box::hull(a0, a1);
    n->convex = base.convex();
    n->rep = SweepRep{std::make_shared<const Domain>(base), dir, t0, t1};
    return Domain(std::move(n));
}

int Domain::dim() const { return node_->dim; }
DomainKind Domain::kind() const { return node_->kind; }
const Box& Domain::bbox() const { return node_->bbox; }
bool Domain::convex() const { return node_->convex; }

const PolytopeRep& Domain::as_polytope() const {
    if (kind() != DomainKind::polytope) throw PreconditionError("domain is not a polytope");
    return std::get<PolytopeRep>(node_->rep);
}
const BallRep& Domain::as_ball() const {
    if (kind() != DomainKind::ball) throw PreconditionError("domain is not a ball");
    return std::get<BallRep>(node_->rep);
}
const ConeBodyRep& Domain::as_cone_body() const {
    if (kind() != DomainKind::cone_body) throw PreconditionError("domain is not a cone_body");
    return std::get<ConeBodyRep>(node_->rep);
}
const SetListRep& Domain::as_set_list() const {
    if (kind() != DomainKind::union_of && kind() != DomainKind::intersection)
        throw PreconditionError("domain is not a union or intersection");
    return std::get<SetListRep>(node_->rep);
}
const AffineRep& Domain::as_affine() const {
    if (kind() != DomainKind::affine_image) throw PreconditionError("domain is not an affine image");
    return std::get<AffineRep>(node_->rep);
}
const SweepRep& Domain::as_sweep() const {
    if (kind() != DomainKind::sweep) throw PreconditionError("domain is not a sweep");
    return std::get<SweepRep>(node_->rep);
}

namespace {

bool sweep_contains(const SweepRep& s, const Point& y);

}  // namespace

bool Domain::contains(const Point& x) const {
    const Node& n = *node_;
    if (x.size() != n.dim) require_dim(n.dim, static_cast<int>(x.size()), "membership");
    if (!n.bbox.contains(x, 1e-12)) return false;
    switch (n.kind) {
        case DomainKind::polytope: {
            const auto& p = std::get<PolytopeRep>(n.rep);
            const int m = static_cast<int>(p.b.size());
            const int d = n.dim;
            const double* at = n.At.data();
            for (int i = 0; i < m; ++i) {
                double s = 0;
                for (int k = 0; k < d; ++k) s += at[i * d + k] * x[k];
                double bi = p.b[i];
                double slack = kSlack * std::max({1.0, std::abs(bi), p.row_norm[i]});
                if (s > bi + slack) return false;
            }
            return true;
        }
        case DomainKind::ball: {
            const auto& b = std::get<BallRep>(n.rep);
            double r2 = b.radius * b.radius;
            return (x - b.center).squaredNorm() <= r2 * (1 + 2 * kSlack) + 1e-24;
        }
        case DomainKind::cone_body: {
            const auto& c = std::get<ConeBodyRep>(n.rep);
            double s = x.dot(c.xi);
            if (s > 1 + kSlack) return false;
            return x.norm() * (1 - c.eps) <= s + kSlack;
        }
        case DomainKind::union_of: {
            for (const auto& m : std::get<SetListRep>(n.rep).members)
                if (m.contains(x)) return true;
            return false;
        }
        case DomainKind::intersection: {
            for (const auto& m : std::get<SetListRep>(n.rep).members)
                if (!m.contains(x)) return false;
            return true;
        }
        case DomainKind::affine_image: {
            const auto& a = std::get<AffineRep>(n.rep);
            return a.base->contains(a.map.inverse(x));
        }
        case DomainKind::sweep: return sweep_contains(std::get<SweepRep>(n.rep), x);
    }
    return false;
}

bool membership(const Domain& dom, const Point& x) {
    require_dim(dom.dim(), static_cast<int>(x.size()), "membership");
    if (!check_finite(x)) throw PreconditionError("membership: non-finite point");
    return dom.contains(x);
}

// ---------------------------------------------------------------- line intervals

namespace {

Interval meet(Interval a, Interval b) { return Interval{std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

// roots of a t^2 + b t + c = 0, ascending; returns count
int quadratic_roots(double a, double b, double c, double& r1, double& r2) {
    double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    if (std::abs(a) <= 1e-14 * scale) {
        if (std::abs(b) <= 1e-300) return 0;
        r1 = r2 = -c / b;
        return 1;
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) return 0;
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + std::copysign(sq, b));
    double x1 = q / a;
    double x2 = q != 0 ? c / q : x1;
    r1 = std::min(x1, x2);
    r2 = std::max(x1, x2);
    return 2;
}

std::optional<Interval> cone_line_interval(const Domain& dom, const ConeBodyRep& c, const Point& x, const Point& e) {
    // breakpoints of the three constraints; the feasible set is an interval because K is convex
    double k = 1 - c.eps;
    double alpha = x.dot(c.xi), beta = e.dot(c.xi);
    std::vector<double> bp;
    if (std::abs(beta) > 1e-300) {
        bp.push_back(-alpha / beta);
        bp.push_back((1 - alpha) / beta);
    }
    double A2 = k * k * e.squaredNorm() - beta * beta;
    double B2 = 2 * (k * k * x.dot(e) - alpha * beta);
    double C2 = k * k * x.squaredNorm() - alpha * alpha;
    double r1, r2;
    int nr = quadratic_roots(A2, B2, C2, r1, r2);
    if (nr >= 1) bp.push_back(r1);
    if (nr >= 2) bp.push_back(r2);
    double span = 4 * dom.bbox().max_extent() / std::max(1e-300, e.norm()) + 1;
    bp.push_back(-span);
    bp.push_back(span);
    std::sort(bp.begin(), bp.end());
    Interval out;
    auto in = [&](double t) {
        Point p = x + t * e;
        return dom.contains(p);
    };
    for (std::size_t i = 0; i < bp.size(); ++i) {
        if (in(bp[i])) {
            out.lo = std::min(out.empty() ? bp[i] : out.lo, bp[i]);
            out.hi = std::max(out.empty() ? bp[i] : out.hi, bp[i]);
        }
        if (i + 1 < bp.size() && bp[i + 1] > bp[i]) {
            double mid = 0.5 * (bp[i] + bp[i + 1]);
            if (in(mid)) {
                if (out.empty()) {
                    out.lo = bp[i];
                    out.hi = bp[i + 1];
                } else {
                    out.lo = std::min(out.lo, bp[i]);
                    out.hi = std::max(out.hi, bp[i + 1]);
                }
            }
        }
    }
    return out;
}

}  // namespace

std::optional<Interval> line_interval(const Domain& dom, const Point& x, const Point& e) {
    require_dim(dom.dim(), static_cast<int>(x.size()), "line_interval");
    switch (dom.kind()) {
        case DomainKind::polytope: {
            const auto& p = dom.as_polytope();
            Interval iv{-kInf, kInf};
            double en = e.norm();
            for (int i = 0; i < p.A.rows(); ++i) {
                double ae = p.A.row(i).dot(e), ax = p.A.row(i).dot(x);
                double slack = kSlack * std::max({1.0, std::abs(p.b[i]), p.row_norm[i]});
                double rhs = p.b[i] + slack - ax;
                if (std::abs(ae) <= 1e-15 * p.row_norm[i] * en) {
                    if (rhs < 0) return Interval{};
                } else if (ae > 0) {
                    iv.hi = std::min(iv.hi, rhs / ae);
                } else {
                    iv.lo = std::max(iv.lo, rhs / ae);
                }
            }
            return iv;
        }
        case DomainKind::ball: {
            const auto& b = dom.as_ball();
            Point w = x - b.center;
            double a = e.squaredNorm();
            double bb = 2 * e.dot(w);
            double c = w.squaredNorm() - b.radius * b.radius * (1 + 2 * kSlack);
            double r1, r2;
            int nr = quadratic_roots(a, bb, c, r1, r2);
            if (nr < 2) return Interval{};
            return Interval{r1, r2};
        }
        case DomainKind::cone_body: return cone_line_interval(dom, dom.as_cone_body(), x, e);
        case DomainKind::affine_image: {
            const auto& a = dom.as_affine();
            return line_interval(*a.base, a.map.inverse(x), a.map.linear_inverse(e));
        }
        case DomainKind::intersection: {
            Interval iv{-kInf, kInf};
            for (const auto& m : dom.as_set_list().members) {
                auto mi = line_interval(m, x, e);
                if (!mi) return std::nullopt;
                iv = meet(iv, *mi);
            }
            return iv;
        }
        default: return std::nullopt;
    }
}

namespace {

bool interval_hits(const Interval& iv, double t0, double t1) {
    if (iv.empty()) return false;
    double tol = 1e-12 * (1 + std::max(std::abs(t0), std::abs(t1)));
    return iv.lo <= t1 + tol && iv.hi >= t0 - tol;
}

bool sweep_contains(const SweepRep& s, const Point& y) {
    Point back = -s.dir;
    if (auto iv = line_interval(*s.base, y, back)) return interval_hits(*iv, s.t0, s.t1);
    if (s.base->kind() == DomainKind::union_of) {
        bool all_exact = true;
        for (const auto& m : s.base->as_set_list().members) {
            auto iv = line_interval(m, y, back);
            if (!iv) {
                all_exact = false;
                break;
            }
            if (interval_hits(*iv, s.t0, s.t1)) return true;
        }
        if (all_exact) return false;
    }
    const int steps = 256;
    for (int k = 0; k <= steps; ++k) {
        double t = s.t0 + (s.t1 - s.t0) * k / steps;
        Point p = y - t * s.dir;
        if (s.base->contains(p)) return true;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------- images, vertices, volume

Domain image(const Domain& dom, const AffineMap& map) {
    require_dim(dom.dim(), map.dim(), "image");
    if (dom.kind() == DomainKind::polytope) {
        const auto& p = dom.as_polytope();
        Mat A = p.A * map.Minv;
        Vec b = p.b + A * Vec(map.shift);
        return Domain::polytope(A, b);
    }
    if (dom.kind() == DomainKind::ball) {
        Mat G = map.M.transpose() * map.M;
        double s2 = G.trace() / G.rows();
        if ((G - s2 * Mat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-12 * s2) {
            const auto& b = dom.as_ball();
            return Domain::ball(map.apply(b.center), std::sqrt(s2) * b.radius);
        }
    }
    if (dom.kind() == DomainKind::affine_image) {
        const auto& a = dom.as_affine();
        return image(*a.base, a.map.then(map));
    }
    return Domain::affine_image(dom, map);
}

Domain dilate(const Domain& dom, double lambda) {
    if (!(lambda > 0)) throw PreconditionError("dilate: factor must be positive");
    return image(dom, AffineMap::scaling(dom.dim(), lambda));
}

std::vector<Point> polytope_vertices(const Domain& poly) {
    const auto& p = poly.as_polytope();
    const int d = poly.dim();
    const int m = static_cast<int>(p.A.rows());
    std::vector<Point> out;
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    if (m < d) return out;
    double scale = poly.bbox().max_extent();
    for (;;) {
        Mat S(d, d);
        Vec rhs(d);
        for (int i = 0; i < d; ++i) {
            S.row(i) = p.A.row(idx[i]) / p.row_norm[idx[i]];
            rhs[i] = p.b[idx[i]] / p.row_norm[idx[i]];
        }
        Eigen::FullPivLU<Mat> lu(S);
        if (lu.rank() == d && std::abs(lu.determinant()) > 1e-10) {
            Vec v = lu.solve(rhs);
            Point x = v;
            bool feasible = true;
            for (int i = 0; i < m && feasible; ++i)
                if (p.A.row(i).dot(v) > p.b[i] + 1e-9 * std::max(1.0, scale) * p.row_norm[i]) feasible = false;
            if (feasible) {
                bool dup = false;
                for (const auto& q : out)
                    if ((q - x).norm() <= 1e-9 * std::max(1.0, scale)) {
                        dup = true;
                        break;
                    }
                if (!dup) out.push_back(x);
            }
        }
        int k = d - 1;
        while (k >= 0 && idx[k] == m - d + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

std::optional<double> Domain::exact_volume() const {
    switch (kind()) {
        case DomainKind::polytope: {
            auto verts = polytope_vertices(*this);
            if (dim() == 1) return std::abs(verts.at(1)[0] - verts.at(0)[0]);
            if (dim() == 2) return polygon_area(convex_hull_2d(verts));
            // axis-aligned boxes
            Point lo = verts[0], hi = verts[0];
            for (const auto& v : verts) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            if (static_cast<int>(verts.size()) == (1 << dim())) {
                bool is_box = true;
                for (const auto& v : verts)
                    for (int i = 0; i < dim(); ++i) {
                        double s = std::max(1.0, hi[i] - lo[i]);
                        if (std::abs(v[i] - lo[i]) > 1e-9 * s && std::abs(v[i] - hi[i]) > 1e-9 * s) is_box = false;
                    }
                if (is_box) return Box{lo, hi}.volume();
            }
            return std::nullopt;
        }
        case DomainKind::ball: return ball_volume(dim(), as_ball().radius);
        case DomainKind::cone_body: {
            double k = 1 - as_cone_body().eps;
            double rim = std::sqrt(std::max(0.0, 1.0 / (k * k) - 1.0));
            if (dim() == 1) return 1.0;
            return ball_volume(dim() - 1, rim) / dim();
        }
        case DomainKind::affine_image: {
            const auto& a = as_affine();
            auto v = a.base->exact_volume();
            if (!v) return std::nullopt;
            return *v * std::abs(a.map.det);
        }
        default: return std::nullopt;
    }
}

// ---------------------------------------------------------------- planar helpers

double polygon_area(const std::vector<Point>& ccw) {
    double s = 0;
    const std::size_t n = ccw.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = ccw[i];
        const Point& q = ccw[(i + 1) % n];
        s += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * s;
}

std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
    for (const auto& p : pts) require_dim(2, static_cast<int>(p.size()), "convex_hull_2d");
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return (a - b).norm() < 1e-14; }),
              pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Point& o, const Point& a, const Point& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

}  // namespace wlab
