#include "wlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace wlab {

std::array<Point, 6> hexagon_template() {
    return {make_point({0, 2}), make_point({-1, 1}), make_point({-1, -1}),
            make_point({0, -2}), make_point({1, -1}), make_point({1, 1})};
}

namespace {

using Params = Eigen::Matrix<double, 6, 1>;

AffineMap params_map(const Params& th) {
    Mat M(2, 2);
    M << th[0], th[1], th[2], th[3];
    Point s = make_point({th[4], th[5]});
    AffineMap m;
    m.M = M;
    m.shift = s;
    m.det = M.determinant();
    if (std::abs(m.det) > 1e-300) m.Minv = M.inverse();
    return m;
}

// Plain Nelder-Mead on R^6.
Params nelder_mead(const std::function<double(const Params&)>& f, Params x0, double step, int budget, int& used,
                   double& fbest) {
    const int n = 6;
    std::vector<Params> s(n + 1, x0);
    std::vector<double> fv(n + 1);
    for (int i = 0; i < n; ++i) s[i + 1][i] += step;
    for (int i = 0; i <= n; ++i) fv[i] = f(s[i]);
    used += n + 1;
    while (used < budget) {
        std::vector<int> ord(n + 1);
        for (int i = 0; i <= n; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        std::vector<Params> s2;
        std::vector<double> f2;
        for (int i : ord) {
            s2.push_back(s[i]);
            f2.push_back(fv[i]);
        }
        s = s2;
        fv = f2;
        double size = 0;
        for (int i = 1; i <= n; ++i) size = std::max(size, (s[i] - s[0]).cwiseAbs().maxCoeff());
        if (size < 1e-15 * (1 + s[0].cwiseAbs().maxCoeff()) || fv[n] - fv[0] <= 1e-32) break;
        Params c = Params::Zero();
        for (int i = 0; i < n; ++i) c += s[i];
        c /= n;
        Params xr = c + (c - s[n]);
        double fr = f(xr);
        ++used;
        if (fr < fv[0]) {
            Params xe = c + 2 * (c - s[n]);
            double fe = f(xe);
            ++used;
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
        } else {
            bool outside = fr < fv[n];
            Params xc = outside ? Params(c + 0.5 * (xr - c)) : Params(c + 0.5 * (s[n] - c));
            double fc = f(xc);
            ++used;
            if (fc < (outside ? fr : fv[n])) {
                s[n] = xc;
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    s[i] = s[0] + 0.5 * (s[i] - s[0]);
                    fv[i] = f(s[i]);
                }
                used += n;
            }
        }
    }
    int b = static_cast<int>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    fbest = fv[b];
    return s[b];
}

}  // namespace

HexagonResult inscribed_affine_hexagon(const Domain& dom, std::uint64_t seed) {
    if (dom.dim() != 2) throw DimensionError("inscribed_affine_hexagon: planar bodies only");
    if (!dom.convex()) throw PreconditionError("inscribed_affine_hexagon: body must be convex");
    const auto tmpl = hexagon_template();
    const double scale = std::max(1e-300, dom.bbox().max_extent());
    double area;
    if (auto v = dom.exact_volume())
        area = *v;
    else
        area = make_plan(dom, 20000, seed).volume;
    const double det_floor = 0.02 * area;

    auto residuals = [&](const Params& th, Eigen::Matrix<double, 7, 1>& res) {
        AffineMap m = params_map(th);
        for (int i = 0; i < 6; ++i) {
            Point v = m.M * tmpl[i] + m.shift;
            double sd = signed_distance(dom, v);
            res[i] = sd > 0 ? sd * 10.0 : sd;
        }
        double dd = std::abs(m.det);
        res[6] = dd < det_floor ? (det_floor - dd) / det_floor * scale : 0.0;
    };
    auto objective = [&](const Params& th) {
        Eigen::Matrix<double, 7, 1> r;
        residuals(th, r);
        return r.squaredNorm();
    };

    Point inner_c = dom.bbox().center();
    double inner_r = 0;
    if (dom.kind() == DomainKind::polytope) {
        auto ib = inscribed_ball(dom);
        inner_c = ib.center;
        inner_r = ib.radius;
    } else if (dom.kind() == DomainKind::ball) {
        inner_c = dom.as_ball().center;
        inner_r = dom.as_ball().radius;
    }
    HexagonResult best;
    double best_obj = kInf;
    Params best_th;
    std::vector<std::pair<Params, double>> finished;
    int total_evals = 0;
    for (int start = 0; start < 16; ++start) {
        Rng local(Rng::derive(seed, start));
        double phi = local.uniform(0, 2 * M_PI);
        Params th;
        if (start % 2 == 0 && inner_r > 0) {
            // regular hexagon in the inner disk, rotated
            double a = inner_r * std::sqrt(3.0) / 2, b = inner_r / 2;
            double c = std::cos(phi), sn = std::sin(phi);
            th << c * a, -sn * b, sn * a, c * b, inner_c[0], inner_c[1];
        } else {
            auto pts = sample_points(dom, 1, local);
            if (pts.empty()) throw PreconditionError("inscribed_affine_hexagon: empty body");
            double s = std::sqrt(area / 6.0) * local.uniform(0.3, 0.7);
            th << s * std::cos(phi), -s * std::sin(phi), s * std::sin(phi), s * std::cos(phi), pts[0][0], pts[0][1];
        }
        int used = 0;
        double fb = 0;
        th = nelder_mead(objective, th, 0.1 * scale, 4000, used, fb);
        // restart from the best vertex with a smaller simplex
        th = nelder_mead(objective, th, 1e-3 * scale, 5000, used, fb);

        // Levenberg-Marquardt polish on the residual vector
        double lambda = 1e-3;
        Eigen::Matrix<double, 7, 1> r;
        residuals(th, r);
        for (int it = 0; it < 100 && used < 5000 + 800; ++it) {
            Eigen::Matrix<double, 7, 6> J;
            double h = 1e-7 * scale;
            for (int j = 0; j < 6; ++j) {
                Params tp = th, tm = th;
                tp[j] += h;
                tm[j] -= h;
                Eigen::Matrix<double, 7, 1> rp, rm;
                residuals(tp, rp);
                residuals(tm, rm);
                J.col(j) = (rp - rm) / (2 * h);
            }
            used += 12;
            Eigen::Matrix<double, 6, 6> H = J.transpose() * J;
            Eigen::Matrix<double, 6, 1> g = J.transpose() * r;
            bool stepped = false;
            for (int tries = 0; tries < 10; ++tries) {
                Eigen::Matrix<double, 6, 6> Hd = H;
                for (int j = 0; j < 6; ++j) Hd(j, j) += lambda * (H(j, j) + 1e-12);
                Params step = -Hd.ldlt().solve(g);
                Params tn = th + step;
                Eigen::Matrix<double, 7, 1> rn;
                residuals(tn, rn);
                ++used;
                if (rn.squaredNorm() < r.squaredNorm()) {
                    th = tn;
                    r = rn;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 10;
            }
            if (!stepped || r.norm() < 1e-15 * scale) break;
        }
        total_evals += used;
        double obj = r.squaredNorm();
        finished.emplace_back(th, obj);
        if (obj < best_obj) {
            best_obj = obj;
            best_th = th;
        }
    }
    // among converged candidates prefer the largest hexagon
    double tol = 1e-8 * std::max(1.0, scale);
    double best_area = -1;
    for (const auto& [th, obj] : finished) {
        Eigen::Matrix<double, 7, 1> r;
        residuals(th, r);
        if (r.head(6).cwiseAbs().maxCoeff() <= tol && r[6] == 0) {
            double a = 6 * std::abs(th[0] * th[3] - th[1] * th[2]);
            if (a > best_area) {
                best_area = a;
                best_th = th;
            }
        }
    }
    AffineMap m = params_map(best_th);
    best.map = AffineMap::make(m.M, m.shift);
    double res = 0;
    for (int i = 0; i < 6; ++i) {
        best.vertices[i] = best.map.apply(tmpl[i]);
        res = std::max(res, std::abs(signed_distance(dom, best.vertices[i])));
    }
    best.residual = res;
    best.area = 6 * std::abs(best.map.det);
    best.converged = res <= tol && std::abs(best.map.det) >= det_floor;
    best.evaluations = total_evals;
    return best;
}

}  // namespace wlab
