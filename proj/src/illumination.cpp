#include "wlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

double signed_distance(const Domain& dom, const Point& x) {
    require_dim(dom.dim(), static_cast<int>(x.size()), "signed_distance");
    switch (dom.kind()) {
        case DomainKind::polytope: {
            const auto& p = dom.as_polytope();
            double s = -kInf;
            for (int i = 0; i < p.A.rows(); ++i) s = std::max(s, (p.A.row(i).dot(x) - p.b[i]) / p.row_norm[i]);
            return s;
        }
        case DomainKind::ball: {
            const auto& b = dom.as_ball();
            return (x - b.center).norm() - b.radius;
        }
        case DomainKind::affine_image: {
            const auto& a = dom.as_affine();
            Eigen::JacobiSVD<Mat> svd(a.map.M);
            double smin = svd.singularValues()[svd.singularValues().size() - 1];
            return smin * signed_distance(*a.base, a.map.inverse(x));
        }
        case DomainKind::intersection: {
            double s = -kInf;
            for (const auto& m : dom.as_set_list().members) s = std::max(s, signed_distance(m, x));
            return s;
        }
        default: throw PreconditionError(std::string("signed_distance: unavailable for ") + to_string(dom.kind()));
    }
}

namespace {

double boundary_tol(const Domain& dom) { return 1e-8 * std::max(1.0, dom.bbox().max_extent()); }

bool has_signed_distance(const Domain& dom) {
    switch (dom.kind()) {
        case DomainKind::polytope:
        case DomainKind::ball: return true;
        case DomainKind::affine_image: return has_signed_distance(*dom.as_affine().base);
        case DomainKind::intersection:
            for (const auto& m : dom.as_set_list().members)
                if (!has_signed_distance(m)) return false;
            return true;
        default: return false;
    }
}

std::vector<Point> probe_dirs(int d) {
    std::vector<Point> v;
    for (int i = 0; i < d; ++i) {
        Point e = Point::Zero(d);
        e[i] = 1;
        v.push_back(e);
        v.push_back(-e);
    }
    Rng rng(31);
    for (int k = 0; k < 8; ++k) v.push_back(rng.unit_vector(d));
    return v;
}

bool strictly_interior(const Domain& dom, const Point& y, double eta) {
    if (!dom.contains(y)) return false;
    const int d = dom.dim();
    for (int i = 0; i < d; ++i) {
        Point p = y;
        p[i] += eta;
        if (!dom.contains(p)) return false;
        p[i] -= 2 * eta;
        if (!dom.contains(p)) return false;
    }
    return true;
}

}  // namespace

bool on_boundary(const Domain& dom, const Point& x) {
    require_dim(dom.dim(), static_cast<int>(x.size()), "on_boundary");
    double tol = boundary_tol(dom);
    if (has_signed_distance(dom)) return std::abs(signed_distance(dom, x)) <= tol;
    bool in = false, out = false;
    for (const auto& u : probe_dirs(dom.dim())) {
        Point p = x + tol * u;
        if (dom.contains(p))
            in = true;
        else
            out = true;
    }
    if (dom.contains(x)) in = true; else out = true;
    return in && out;
}

bool illuminated(const Domain& dom, const Point& x, const Point& e) {
    require_dim(dom.dim(), static_cast<int>(x.size()), "illuminated");
    require_dim(dom.dim(), static_cast<int>(e.size()), "illuminated");
    if (!on_boundary(dom, x)) throw PreconditionError("illuminated: point is not on the boundary");
    switch (dom.kind()) {
        case DomainKind::polytope: {
            const auto& p = dom.as_polytope();
            double tol = boundary_tol(dom);
            for (int i = 0; i < p.A.rows(); ++i) {
                double gap = (p.b[i] - p.A.row(i).dot(x)) / p.row_norm[i];
                if (gap > tol) continue;  // inactive
                if (!(p.A.row(i).dot(e) < -1e-12 * p.row_norm[i] * e.norm())) return false;
            }
            return true;
        }
        case DomainKind::ball: {
            const auto& b = dom.as_ball();
            return e.dot(x - b.center) < -1e-12 * b.radius * e.norm();
        }
        case DomainKind::affine_image: {
            const auto& a = dom.as_affine();
            Point xb = a.map.inverse(x);
            Point eb = a.map.linear_inverse(e);
            if (on_boundary(*a.base, xb)) return illuminated(*a.base, xb, eb);
            break;
        }
        default: break;
    }
    // ray sampling
    double diam = dom.bbox().extent().norm();
    double eta = 1e-7 * std::max(1.0, dom.bbox().max_extent());
    Point u = e / e.norm();
    const int n = 10000;
    for (int k = 1; k <= n; ++k) {
        double t = 2 * diam * k / n;
        if (strictly_interior(dom, x + t * u, eta)) return true;
    }
    // near-tangent rays: a finer look close to x
    for (int k = 1; k <= 64; ++k) {
        double t = 2 * diam / n * k / 64.0;
        if (strictly_interior(dom, x + t * u, std::min(eta, t / 4))) return true;
    }
    return false;
}

XrayResult xray_verifies(const Domain& dom, const DirectionSet& E, const std::vector<Point>& sample) {
    if (sample.empty()) throw PreconditionError("xray_verifies: empty boundary sample");
    require_dim(dom.dim(), E.dim(), "xray_verifies");
    if (dom.kind() == DomainKind::polytope) {
        double tol = 1e-9 * std::max(1.0, dom.bbox().max_extent());
        for (const auto& v : polytope_vertices(dom)) {
            bool found = false;
            for (const auto& s : sample)
                if ((s - v).norm() <= tol) {
                    found = true;
                    break;
                }
            if (!found) throw PreconditionError("xray_verifies: boundary sample must include every polytope vertex");
        }
    }
    DirectionSet D = E.symmetrized();
    XrayResult out;
    for (const auto& x : sample) {
        bool lit = false;
        for (const auto& e : D.dirs)
            if (illuminated(dom, x, e)) {
                lit = true;
                break;
            }
        if (!lit) out.witnesses.push_back(x);
    }
    out.ok = out.witnesses.empty();
    return out;
}

namespace {

Point interior_point(const Domain& dom) {
    Point c = dom.bbox().center();
    if (dom.kind() == DomainKind::ball) return dom.as_ball().center;
    if (dom.contains(c)) return c;
    Rng rng(5);
    auto pts = sample_points(dom, 256, rng);
    if (pts.empty()) throw PreconditionError("boundary_sample: empty domain");
    Point m = Point::Zero(dom.dim());
    for (const auto& p : pts) m += p;
    m /= static_cast<double>(pts.size());
    if (dom.contains(m)) return m;
    return pts[0];
}

// Last point of the ray from c (inside) in direction u that is in dom.
Point ray_exit(const Domain& dom, const Point& c, const Point& u) {
    if (auto iv = line_interval(dom, c, u); iv && !iv->empty()) return c + iv->hi * u;
    double span = 2 * dom.bbox().extent().norm();
    const int steps = 512;
    double lo = 0, hi = span;
    for (int k = 1; k <= steps; ++k) {
        double t = span * k / steps;
        if (!dom.contains(c + t * u)) {
            hi = t;
            break;
        }
        lo = t;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (dom.contains(c + mid * u))
            lo = mid;
        else
            hi = mid;
    }
    return c + lo * u;
}

}  // namespace

std::vector<Point> boundary_sample(const Domain& dom, int n, std::uint64_t seed) {
    const int d = dom.dim();
    Rng rng(seed);
    std::vector<Point> out;
    if (dom.kind() == DomainKind::polytope) {
        auto verts = polytope_vertices(dom);
        out = verts;
        const auto& p = dom.as_polytope();
        double tol = 1e-9 * std::max(1.0, dom.bbox().max_extent());
        if (d >= 3) {
            // edges: vertex pairs sharing d-1 active facets
            std::vector<std::vector<int>> act(verts.size());
            for (std::size_t v = 0; v < verts.size(); ++v)
                for (int i = 0; i < p.A.rows(); ++i)
                    if (std::abs(p.A.row(i).dot(verts[v]) - p.b[i]) <= tol * p.row_norm[i]) act[v].push_back(i);
            for (std::size_t a = 0; a < verts.size(); ++a)
                for (std::size_t b = a + 1; b < verts.size(); ++b) {
                    int shared = 0;
                    for (int i : act[a])
                        if (std::find(act[b].begin(), act[b].end(), i) != act[b].end()) ++shared;
                    if (shared >= d - 1)
                        for (int k = 0; k < 3; ++k) {
                            double s = rng.uniform(0.05, 0.95);
                            out.push_back((1 - s) * verts[a] + s * verts[b]);
                        }
                }
        }
    } else if (dom.kind() == DomainKind::ball) {
        const auto& b = dom.as_ball();
        for (int k = 0; k < n; ++k) out.push_back(b.center + b.radius * rng.unit_vector(d));
        return out;
    }
    Point c = dom.kind() == DomainKind::polytope ? inscribed_ball(dom).center : interior_point(dom);
    for (int k = 0; k < n; ++k) out.push_back(ray_exit(dom, c, rng.unit_vector(d)));
    return out;
}

bool almost_smooth(const Domain& poly) {
    const auto& p = poly.as_polytope();
    const int d = poly.dim();
    if (d < 2) return true;
    double thresh = (d - 2.0) / (d - 1.0);
    double tol = 1e-9 * std::max(1.0, poly.bbox().max_extent());
    for (const auto& v : polytope_vertices(poly)) {
        std::vector<Point> normals;
        for (int i = 0; i < p.A.rows(); ++i)
            if (std::abs(p.A.row(i).dot(v) - p.b[i]) <= tol * p.row_norm[i])
                normals.push_back(Point(p.A.row(i).transpose() / p.row_norm[i]));
        for (std::size_t a = 0; a < normals.size(); ++a)
            for (std::size_t b = a + 1; b < normals.size(); ++b)
                if (normals[a].dot(normals[b]) < thresh - 1e-12) return false;
    }
    return true;
}

}  // namespace wlab
