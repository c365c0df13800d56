#include "wlab/decompose.hpp"

#include "wlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <sstream>

namespace wlab {

namespace {

std::string fmt_point(const Point& x) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    return os.str();
}

// Orthonormal basis of xi^perp as the columns of a d x (d-1) matrix.
Mat perp_frame(const Point& xi) {
    const int d = static_cast<int>(xi.size());
    Mat Q = Eigen::HouseholderQR<Mat>(Mat(xi)).householderQ();
    return Q.rightCols(d - 1);
}

double support(const Domain& dom, const Point& u) {
    switch (dom.kind()) {
        case DomainKind::ball: return dom.as_ball().center.dot(u) + dom.as_ball().radius * u.norm();
        case DomainKind::polytope: {
            double s = -kInf;
            for (const auto& v : polytope_vertices(dom)) s = std::max(s, v.dot(u));
            return s;
        }
        default: {
            const Box& b = dom.bbox();
            double s = 0;
            for (int i = 0; i < u.size(); ++i) s += u[i] >= 0 ? u[i] * b.hi[i] : u[i] * b.lo[i];
            return s;
        }
    }
}

bool nonempty_by_sampling(const Domain& dom, std::uint64_t seed) {
    Rng rng(seed);
    return !sample_points(dom, 1, rng, 200000).empty();
}

// {x : A x <= b} intersected with G; nullopt when empty (exact for polytope G).
std::optional<Domain> clip(const Mat& A, const Vec& b, const Domain& G, std::uint64_t seed) {
    if (G.kind() == DomainKind::polytope) {
        const auto& p = G.as_polytope();
        Mat AA(A.rows() + p.A.rows(), A.cols());
        AA << A, p.A;
        Vec bb(b.size() + p.b.size());
        bb << b, p.b;
        return try_polytope(AA, bb);
    }
    auto P = try_polytope(A, b);
    if (!P) return std::nullopt;
    Domain piece = Domain::intersection({*P, G});
    if (piece.bbox().empty() || !nonempty_by_sampling(piece, seed)) return std::nullopt;
    return piece;
}

bool segment_inside(const Domain& dom, const Point& a, const Point& b, int steps) {
    for (int s = 0; s <= steps; ++s) {
        double t = static_cast<double>(s) / steps;
        if (!dom.contains((1 - t) * a + t * b)) return false;
    }
    return true;
}

}  // namespace

// ---------------------------------------------------------------- sphere covers

std::vector<Point> sphere_cover(int d, double rho, std::uint64_t seed) {
    if (!(rho > 0)) throw PreconditionError("sphere_cover: rho must be positive");
    std::vector<Point> out;
    if (d == 1) return {make_point({1}), make_point({-1})};
    if (d == 2) {
        double a = rho >= 2 ? M_PI : 2 * std::asin(rho / 2);
        int m = std::max(3, static_cast<int>(std::floor(M_PI / a)) + 1);
        for (int k = 0; k < m; ++k) {
            double th = 2 * M_PI * k / m;
            out.push_back(make_point({std::cos(th), std::sin(th)}));
        }
        return out;
    }
    // greedy farthest-point selection on a dense random sample, aiming at 0.8 rho
    const double target = 0.8 * rho;
    long n = static_cast<long>(std::min(2.0e5, 40.0 * std::pow(2.0 / target, d - 1)));
    n = std::max(n, 2000L);
    Rng rng(seed);
    std::vector<Point> cand(n);
    for (auto& c : cand) c = rng.unit_vector(d);
    std::vector<double> gap(n, kInf);
    std::size_t next = 0;
    for (;;) {
        out.push_back(cand[next]);
        double worst = 0;
        for (long i = 0; i < n; ++i) {
            gap[i] = std::min(gap[i], (cand[i] - out.back()).norm());
            if (gap[i] > worst) {
                worst = gap[i];
                next = static_cast<std::size_t>(i);
            }
        }
        if (worst <= target) break;
    }
    return out;
}

// ---------------------------------------------------------------- star-shaped

DecompositionChain star_shaped_decomposition(const Domain& dom, double R, int r, std::uint64_t seed) {
    const int d = dom.dim();
    if (r < 1) throw PreconditionError("star_shaped_decomposition: order must be >= 1");
    if (!(R >= 1)) throw PreconditionError("star_shaped_decomposition: need R >= 1");
    // B_1[0] inside dom, dom inside B_R[0], star shape w.r.t. B_1[0]
    {
        Rng rng(seed);
        for (int k = 0; k < 2000; ++k) {
            Point u = rng.unit_vector(d) * (1 - 1e-9);
            if (!dom.contains(u)) throw PreconditionError("star_shaped_decomposition: B_1[0] is not inside the domain, near " + fmt_point(u));
        }
        auto pts = sample_points(dom, 2000, rng);
        for (const auto& x : pts) {
            if (x.norm() > R * (1 + 1e-9))
                throw PreconditionError("star_shaped_decomposition: domain leaves B_R[0] at " + fmt_point(x));
            Point y = rng.unit_vector(d) * rng.uniform();
            if (!segment_inside(dom, x, y, 32) || !segment_inside(dom, x, Point::Zero(d), 32))
                throw PreconditionError("star_shaped_decomposition: domain is not star-shaped with respect to B_1[0]; segment from " +
                                        fmt_point(x) + " leaves it");
        }
    }
    DecompositionChain ch;
    ch.r = r;
    ch.provenance = "star_shaped";
    ch.target = dom;
    const double c0 = 1 / std::sqrt(static_cast<double>(d));
    ch.pieces.push_back(Domain::box(Point::Constant(d, -c0), Point::Constant(d, c0)));
    ch.hints.push_back({});

    const double half = 1.0 / (2 * d);  // tube half-width
    // the part of a tube with |t| <= a0 lies in the inscribed ball of the cube
    const double a0 = std::sqrt(1.0 / d - (d - 1) * half * half);
    const double step = a0 / r;
    auto dirs = sphere_cover(d, 1.0 / (2 * d * R), seed);
    std::vector<Point> used;
    Rng empt(seed + 1);
    for (const auto& xi : dirs) {
        Mat U = d > 1 ? perp_frame(xi) : Mat(1, 0);
        std::vector<int> tube;
        for (int k = 0;; ++k) {
            double lo = a0 + k * step, hi = a0 + (k + 1) * step;
            if (lo >= R) break;
            Mat A(2 * (d - 1) + 2, d);
            Vec b(2 * (d - 1) + 2);
            for (int i = 0; i < d - 1; ++i) {
                A.row(2 * i) = U.col(i).transpose();
                A.row(2 * i + 1) = -U.col(i).transpose();
                b[2 * i] = b[2 * i + 1] = half;
            }
            A.row(2 * d - 2) = xi.transpose();
            b[2 * d - 2] = hi;
            A.row(2 * d - 1) = -xi.transpose();
            b[2 * d - 1] = -lo;
            auto piece = clip(A, b, dom, empt.next());
            if (!piece) continue;
            std::vector<int> hint = {0};
            for (int q = static_cast<int>(tube.size()) - 1; q >= 0 && q >= static_cast<int>(tube.size()) - r; --q)
                hint.push_back(tube[q]);
            tube.push_back(ch.add(*piece, step * xi, hint));
        }
        if (!tube.empty()) used.push_back(xi);
    }
    ch.dirset = DirectionSet(dirs);
    return ch;
}

// ---------------------------------------------------------------- planar, two directions

PlanarChain planar_two_direction_chain(const Domain& G, int r) {
    if (G.dim() != 2) throw DimensionError("planar_two_direction_chain: planar domains only");
    if (!G.convex()) throw PreconditionError("planar_two_direction_chain: domain must be convex");
    if (G.kind() != DomainKind::polytope && G.kind() != DomainKind::ball)
        throw PreconditionError("planar_two_direction_chain: needs a polygon or a disk");
    if (r < 1) throw PreconditionError("planar_two_direction_chain: order must be >= 1");
    DiameterResult D = diameter(G);
    Point e1 = (D.b - D.a) / (D.b - D.a).norm();
    Point e2 = make_point({-e1[1], e1[0]});
    const double c = D.a.dot(e2);  // height of the diameter chord

    // rectangle R0 = [a1,b1] x [a2,b2] in (e1,e2) coordinates with a2 < c < b2
    double a1, b1, a2, b2, mu;
    if (G.kind() == DomainKind::ball) {
        const auto& B = G.as_ball();
        double w1 = B.radius / std::sqrt(5.0), w2 = 2 * w1;
        double m1 = B.center.dot(e1);
        a1 = m1 - w1;
        b1 = m1 + w1;
        a2 = c - w2;
        b2 = c + w2;
        mu = 2 * w1;
    } else {
        // maximize mu subject to corners in G, b1 - a1 >= mu, b2 - c >= mu, c - a2 >= mu
        const auto& P = G.as_polytope();
        const int m = static_cast<int>(P.A.rows());
        Mat A = Mat::Zero(4 * m + 3, 5);
        Vec b = Vec::Zero(4 * m + 3);
        int row = 0;
        for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
                for (int i = 0; i < m; ++i) {
                    double g1 = P.A.row(i).dot(e1), g2 = P.A.row(i).dot(e2);
                    A(row, s1 ? 1 : 0) = g1;
                    A(row, s2 ? 3 : 2) = g2;
                    b[row++] = P.b[i];
                }
        A(row, 0) = 1, A(row, 1) = -1, A(row, 4) = 1, b[row++] = 0;
        // when the chord lies on the boundary, G sits on one side and the band only needs depth there
        const double tol = 1e-9 * std::max(1.0, G.bbox().max_extent());
        if (support(G, e2) - c > tol)
            A(row, 3) = -1, A(row, 4) = 1, b[row++] = -c;
        else
            A(row, 3) = 1, b[row++] = c;
        if (support(G, -e2) + c > tol)
            A(row, 2) = 1, A(row, 4) = 1, b[row++] = c;
        else
            A(row, 2) = -1, b[row++] = -c;
        Vec cost = Vec::Zero(5);
        cost[4] = -1;
        LpResult lp = solve_lp(A, b, cost);
        if (lp.status != LpStatus::optimal)
            throw ConvergenceError(std::string("planar_two_direction_chain: rectangle LP ") + to_string(lp.status));
        a1 = lp.x[0], b1 = lp.x[1], a2 = lp.x[2], b2 = lp.x[3], mu = lp.x[4];
    }
    if (!(mu > 0)) throw PreconditionError("planar_two_direction_chain: no rectangle with positive margin");
    mu *= 1 - 1e-9;
    const double s = mu / r;

    auto rect = [&](double lo1, double hi1, double lo2, double hi2) {
        Mat A(4, 2);
        A.row(0) = e1.transpose();
        A.row(1) = -e1.transpose();
        A.row(2) = e2.transpose();
        A.row(3) = -e2.transpose();
        Vec b(4);
        b << hi1, -lo1, hi2, -lo2;
        return std::make_pair(A, b);
    };

    PlanarChain out;
    out.dirs = DirectionSet({e1, e2});
    out.margin = mu;
    DecompositionChain& ch = out.chain;
    ch.r = r;
    ch.provenance = "planar";
    ch.target = G;
    ch.dirset = out.dirs;
    {
        auto [A, b] = rect(a1, b1, a2, b2);
        ch.pieces.push_back(Domain::polytope(A, b));
        ch.hints.push_back({});
    }
    const double max1 = support(G, e1), min1 = -support(G, -e1);
    const double max2 = support(G, e2), min2 = -support(G, -e2);
    Rng empt(11);
    std::vector<int> band = {0};
    // strip pieces along +-e1 inside the band a2 <= s2 <= b2
    for (int sign : {1, -1}) {
        std::vector<int> run;
        for (int k = 0;; ++k) {
            double lo = sign > 0 ? b1 + k * s : a1 - (k + 1) * s;
            double hi = sign > 0 ? b1 + (k + 1) * s : a1 - k * s;
            if (sign > 0 ? lo >= max1 : hi <= min1) break;
            auto [A, b] = rect(lo, hi, a2, b2);
            auto piece = clip(A, b, G, empt.next());
            if (!piece) break;
            std::vector<int> hint = {0};
            for (int q = static_cast<int>(run.size()) - 1; q >= 0 && q >= static_cast<int>(run.size()) - r; --q) hint.push_back(run[q]);
            run.push_back(ch.add(*piece, sign * s * e1, hint));
            band.push_back(run.back());
        }
    }
    // full-width slabs along +-e2
    for (int sign : {1, -1}) {
        std::vector<int> run;
        for (int k = 0;; ++k) {
            double lo = sign > 0 ? b2 + k * s : a2 - (k + 1) * s;
            double hi = sign > 0 ? b2 + (k + 1) * s : a2 - k * s;
            if (sign > 0 ? lo >= max2 : hi <= min2) break;
            auto [A, b] = rect(min1 - 1, max1 + 1, lo, hi);
            auto piece = clip(A, b, G, empt.next());
            if (!piece) break;
            std::vector<int> hint;
            for (int q = static_cast<int>(run.size()) - 1; q >= 0 && q >= static_cast<int>(run.size()) - r; --q) hint.push_back(run[q]);
            hint.insert(hint.end(), band.begin(), band.end());
            run.push_back(ch.add(*piece, sign * s * e2, hint));
        }
    }
    return out;
}

// ---------------------------------------------------------------- ball slices

double slice_sigma(double spread, int r) { return 1 + spread * spread / (4.0 * r); }

namespace {

double usable_spread(const DirectionSet& E) {
    if (!E.spans()) throw PreconditionError("direction set does not span R^d");
    // the cone body needs 0 < eps < 1
    return std::min(E.spread, 1 - 1e-9);
}

// {x in B(c, radius) : (x-c).xi >= spread |x-c|}
Domain cone_slice(const Point& c, double radius, const Point& xi, double spread) {
    const int d = static_cast<int>(c.size());
    Domain cone = Domain::cone_body(xi, 1 - spread);
    Domain big = Domain::affine_image(cone, AffineMap::make(Mat::Identity(d, d) * (2 * radius), c));
    return Domain::intersection({Domain::ball(c, radius), big});
}

}  // namespace

DecompositionChain ball_direction_slices(const Point& c, double rho, const DirectionSet& E, int r) {
    if (r < 1) throw PreconditionError("ball_direction_slices: order must be >= 1");
    if (!(rho > 0)) throw PreconditionError("ball_direction_slices: radius must be positive");
    require_dim(static_cast<int>(c.size()), E.dim(), "ball_direction_slices");
    const double eps0 = usable_spread(E);
    const double sigma = slice_sigma(eps0, r);
    DecompositionChain ch;
    ch.r = r;
    ch.provenance = "ball_slices";
    ch.dirset = E;
    ch.pieces.push_back(Domain::ball(c, rho));
    ch.hints.push_back({});
    ch.target = Domain::ball(c, sigma * rho);
    for (const auto& xi : E.symmetrized().dirs) ch.add(cone_slice(c, sigma * rho, xi, eps0), rho * eps0 / (2 * r) * xi, {0});
    return ch;
}

// ---------------------------------------------------------------- Lip-2 ball chains

namespace {

// Conservative test of B(z, rho) inside dom.
bool ball_inside(const Domain& dom, const Point& z, double rho) {
    switch (dom.kind()) {
        case DomainKind::ball: {
            const auto& b = dom.as_ball();
            return (z - b.center).norm() + rho <= b.radius;
        }
        case DomainKind::polytope: return signed_distance(dom, z) <= -rho;
        case DomainKind::intersection: {
            for (const auto& m : dom.as_set_list().members)
                if (!ball_inside(m, z, rho)) return false;
            return true;
        }
        case DomainKind::union_of:
            for (const auto& m : dom.as_set_list().members)
                if (ball_inside(m, z, rho)) return true;
            break;
        default: break;
    }
    if (!dom.contains(z)) return false;
    // sampled sphere and half-radius shell
    const int d = dom.dim();
    const int n = d == 1 ? 2 : d == 2 ? 720 : 4000;
    Rng rng(0xba11);
    for (int k = 0; k < n; ++k) {
        Point u;
        if (d == 2) {
            double th = 2 * M_PI * k / n;
            u = make_point({std::cos(th), std::sin(th)});
        } else if (d == 1) {
            u = make_point({k ? -1.0 : 1.0});
        } else {
            u = rng.unit_vector(d);
        }
        if (!dom.contains(z + rho * u) || !dom.contains(z + 0.5 * rho * u)) return false;
    }
    return true;
}

}  // namespace

DecompositionChain lip2_ball_chain(const Domain& G, const DirectionSet& E, int r, double delta, double eps,
                                   const Lip2Options& opt) {
    const int d = G.dim();
    require_dim(d, E.dim(), "lip2_ball_chain");
    if (r < 1) throw PreconditionError("lip2_ball_chain: order must be >= 1");
    if (!(delta > 0) || !(eps > 0)) throw PreconditionError("lip2_ball_chain: delta and eps must be positive");
    const double eps0 = usable_spread(E);
    const double sigma = 1 + std::min(eps, slice_sigma(eps0, r) - 1);
    const double sq = std::sqrt(static_cast<double>(d));
    const double g = 0.9 * (sigma - 1) * delta / (sq * (1 + (sigma - 1) / 2));
    const double dp = delta - g * sq / 2;  // node ball radius
    const double link = (sigma - 1) * dp;  // B(v, dp) inside B(u, sigma dp) when |u - v| <= link

    // grid nodes z with B(z, dp) inside G
    const Box& bb = G.bbox();
    std::vector<int> per(d);
    long total = 1;
    for (int i = 0; i < d; ++i) {
        per[i] = std::max(1, static_cast<int>(std::floor(bb.extent()[i] / g)) + 1);
        total *= per[i];
    }
    if (total > 4000000) throw PreconditionError("lip2_ball_chain: grid too fine for this delta and eps");
    std::map<std::vector<int>, int> node_of;
    std::vector<Point> nodes;
    std::vector<std::vector<int>> coords;
    {
        std::vector<int> c(d, 0);
        for (long q = 0; q < total; ++q) {
            Point z(d);
            for (int i = 0; i < d; ++i) z[i] = bb.lo[i] + c[i] * g + 0.5 * (bb.extent()[i] - (per[i] - 1) * g);
            if (ball_inside(G, z, dp)) {
                node_of[c] = static_cast<int>(nodes.size());
                nodes.push_back(z);
                coords.push_back(c);
            }
            int i = 0;
            while (i < d && ++c[i] >= per[i]) c[i] = 0, ++i;
        }
    }
    if (nodes.empty()) throw PreconditionError("lip2_ball_chain: no ball of radius delta fits inside the domain");

    auto nearest_node = [&](const Point& x) {
        // nodes within sigma*dp lie within a few cells
        std::vector<int> c(d);
        int reach = static_cast<int>(std::ceil(sigma * dp / g)) + 1;
        for (int i = 0; i < d; ++i)
            c[i] = static_cast<int>(std::lround((x[i] - bb.lo[i] - 0.5 * (bb.extent()[i] - (per[i] - 1) * g)) / g));
        double best = kInf;
        std::vector<int> off(d, -reach);
        for (;;) {
            std::vector<int> q(d);
            for (int i = 0; i < d; ++i) q[i] = c[i] + off[i];
            auto it = node_of.find(q);
            if (it != node_of.end()) best = std::min(best, (nodes[it->second] - x).norm());
            int i = 0;
            while (i < d && ++off[i] > reach) off[i] = -reach, ++i;
            if (i == d) break;
        }
        return best;
    };
    // Lip-2 check: every sample point must be within sigma*dp of a node
    {
        Rng rng(opt.seed);
        auto pts = sample_points(G, opt.check_samples, rng);
        for (const auto& x : pts)
            if (nearest_node(x) > sigma * dp)
                throw PreconditionError("lip2_ball_chain: Lip-2 check failed, no ball of radius " + std::to_string(delta) +
                                        " inside the domain contains " + fmt_point(x));
    }

    // root: node closest to the node centroid
    Point cen = Point::Zero(d);
    for (const auto& z : nodes) cen += z;
    cen /= static_cast<double>(nodes.size());
    int root = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if ((nodes[i] - cen).norm() < (nodes[root] - cen).norm()) root = static_cast<int>(i);

    // breadth-first order over grid neighbours within the link distance
    std::vector<int> parent(nodes.size(), -2), order;
    std::deque<int> queue = {root};
    parent[root] = -1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        order.push_back(u);
        std::vector<int> off(d, -1);
        for (;;) {
            std::vector<int> q(d);
            for (int i = 0; i < d; ++i) q[i] = coords[u][i] + off[i];
            auto it = node_of.find(q);
            if (it != node_of.end() && parent[it->second] == -2 && (nodes[it->second] - nodes[u]).norm() <= link) {
                parent[it->second] = u;
                queue.push_back(it->second);
            }
            int i = 0;
            while (i < d && ++off[i] > 1) off[i] = -1, ++i;
            if (i == d) break;
        }
    }
    if (order.size() < nodes.size()) {
        // witness: the unreached node closest to the reached part
        double best = kInf;
        Point w;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (parent[i] != -2) continue;
            for (int u : order) {
                double dd = (nodes[i] - nodes[u]).norm();
                if (dd < best) {
                    best = dd;
                    w = 0.5 * (nodes[i] + nodes[u]);
                }
            }
        }
        throw PreconditionError("lip2_ball_chain: cover graph is disconnected (Lip-2 fails), gap near " + fmt_point(w));
    }

    DecompositionChain ch;
    ch.r = r;
    ch.provenance = "lip2";
    ch.dirset = E;
    ch.target = G;
    auto dirs = E.symmetrized().dirs;
    const Point& z0 = nodes[root];
    // E_0: cube inside B(z0, dp), then rings growing by sigma up to B(z0, dp)
    double rho = dp / sq * (1 - 1e-9);
    ch.pieces.push_back(Domain::box(z0.array() - rho, z0.array() + rho));
    ch.hints.push_back({});
    std::vector<int> prev = {0};
    while (rho < dp) {
        double next = std::min(sigma * rho, dp);
        std::vector<int> ring;
        for (const auto& xi : dirs) {
            Domain piece = Domain::intersection({Domain::ball(z0, next), cone_slice(z0, sigma * rho, xi, eps0)});
            std::vector<int> hint = prev;
            hint.push_back(0);
            ring.push_back(ch.add(piece, rho * eps0 / (2 * r) * xi, hint));
        }
        prev = ring;
        rho = next;
    }
    std::vector<std::vector<int>> slices_of(nodes.size());
    for (std::size_t q = 0; q < order.size(); ++q) {
        int v = order[q];
        std::vector<int> hint;
        if (v == root) {
            hint = prev;
        } else {
            for (int a = parent[v], depth = 0; a >= 0 && depth < 3; a = parent[a], ++depth)
                hint.insert(hint.end(), slices_of[a].begin(), slices_of[a].end());
            if (parent[v] == root) hint.insert(hint.end(), prev.begin(), prev.end());
        }
        for (const auto& xi : dirs) {
            Domain piece = Domain::intersection({cone_slice(nodes[v], sigma * dp, xi, eps0), G});
            slices_of[v].push_back(ch.add(piece, dp * eps0 / (2 * r) * xi, hint));
        }
    }
    return ch;
}

// ---------------------------------------------------------------- X-ray slabs

namespace {

// Largest m with lam0 G + B_m inside lam1 G (0 interior to G).
double dilate_margin(const Domain& G, double lam0, double lam1, std::uint64_t seed) {
    if (G.kind() == DomainKind::polytope) {
        const auto& p = G.as_polytope();
        double m = kInf;
        for (int i = 0; i < p.A.rows(); ++i) m = std::min(m, (lam1 - lam0) * p.b[i] / p.row_norm[i]);
        return m;
    }
    if (G.kind() == DomainKind::ball) {
        const auto& b = G.as_ball();
        return (lam1 - lam0) * (b.radius - b.center.norm());
    }
    // binary search with sampled containment
    Domain inner = dilate(G, lam0), outer = dilate(G, lam1);
    Rng rng(seed);
    auto pts = boundary_sample(inner, 600, seed);
    const int d = G.dim();
    auto ok = [&](double m) {
        for (const auto& x : pts)
            for (int k = 0; k < 8; ++k)
                if (!outer.contains(x + m * rng.unit_vector(d))) return false;
        return true;
    };
    double lo = 0, hi = G.bbox().max_extent();
    for (int it = 0; it < 50; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

DecompositionChain xray_slab_decomposition(const Domain& G, const DirectionSet& E, int n0, int r, const XrayOptions& opt) {
    const int d = G.dim();
    require_dim(d, E.dim(), "xray_slab_decomposition");
    if (r < 1) throw PreconditionError("xray_slab_decomposition: order must be >= 1");
    if (!G.convex()) throw PreconditionError("xray_slab_decomposition: domain must be convex");
    if (!G.contains(Point::Zero(d))) throw PreconditionError("xray_slab_decomposition: 0 must be interior to the domain");
    {
        auto bs = boundary_sample(G, opt.boundary_samples, opt.seed);
        XrayResult xr = xray_verifies(G, E, bs);
        if (!xr.ok) {
            std::string msg = "xray_slab_decomposition: E does not X-ray the domain; " + std::to_string(xr.witnesses.size()) +
                              " unilluminated boundary points, e.g. " + fmt_point(xr.witnesses[0]);
            throw XrayFailure(msg, xr.witnesses);
        }
    }
    const double diam = diameter(G).value;
    auto dirs = E.symmetrized().dirs;
    int first = n0 > 0 ? n0 : 1, last = n0 > 0 ? n0 : opt.max_n0;
    for (int n = first; n <= last; ++n) {
        const double lam0 = (n + 1.0) / (n + 2.0);
        const int n1 = n + 2;
        const double lam1 = (n1 + 1.0) / (n1 + 2.0);
        double margin = dilate_margin(G, lam0, lam1, opt.seed);
        if (!(margin > 0)) throw PreconditionError("xray_slab_decomposition: slab depth search collapsed to 0");
        const double delta = margin / r * (1 - 1e-9);
        Domain S = dilate(G, lam0);

        // rays from S_{n0} must reach all of G
        {
            Rng rng(opt.seed + n);
            auto pts = sample_points(G, opt.coverage_samples, rng);
            bool covered = true;
            for (const auto& x : pts) {
                bool hit = false;
                for (const auto& e : dirs) {
                    // x = y - t e with y in S, t >= 0  <=>  the ray x + t e meets S
                    auto iv = line_interval(S, x, e);
                    if (iv) {
                        if (!iv->empty() && iv->hi >= 0) hit = true;
                    } else {
                        for (int k = 0; k <= 256 && !hit; ++k) hit = S.contains(x + diam * k / 256.0 * e);
                    }
                    if (hit) break;
                }
                if (!hit) {
                    covered = false;
                    break;
                }
            }
            if (!covered) {
                if (n == last)
                    throw PreconditionError("xray_slab_decomposition: rays from S_n do not cover the domain for n <= " +
                                            std::to_string(last));
                continue;
            }
        }

        DecompositionChain ch;
        ch.r = r;
        ch.provenance = "xray";
        ch.dirset = E;
        ch.target = G;
        ch.pieces.push_back(dilate(G, lam1));
        ch.hints.push_back({});
        const int slabs = static_cast<int>(std::ceil(diam / delta)) + 1;
        for (const auto& e : dirs) {
            std::vector<int> run;
            for (int j = 1; j <= slabs; ++j) {
                double t0 = (r + j - 1) * delta, t1 = (r + j) * delta;
                if (t0 > diam) break;
                Domain piece = Domain::intersection({G, Domain::sweep(S, -e, t0, t1)});
                if (piece.bbox().empty()) break;
                std::vector<int> hint = {0};
                for (int q = static_cast<int>(run.size()) - 1; q >= 0 && q >= static_cast<int>(run.size()) - r; --q) hint.push_back(run[q]);
                run.push_back(ch.add(piece, -delta * e, hint));
            }
        }
        return ch;
    }
    throw PreconditionError("xray_slab_decomposition: no admissible n0");
}

}  // namespace wlab
