#include "wlab/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wlab {

namespace {

long binomial_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<long>(std::llround(r));
}

// Vertices of {x : |xi_i . x| <= 1} by enumeration of d-subsets and sign patterns.
double max_vertex_norm(const std::vector<Point>& dirs, int d) {
    const int m = static_cast<int>(dirs.size());
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    double best = 0;
    for (;;) {
        Mat S(d, d);
        for (int i = 0; i < d; ++i) S.row(i) = dirs[idx[i]].transpose();
        Eigen::FullPivLU<Mat> lu(S);
        if (lu.rank() == d) {
            for (int mask = 0; mask < (1 << d); ++mask) {
                Vec rhs(d);
                for (int i = 0; i < d; ++i) rhs[i] = (mask >> i & 1) ? -1.0 : 1.0;
                Vec x = lu.solve(rhs);
                bool ok = true;
                for (int j = 0; j < m && ok; ++j)
                    if (std::abs(dirs[j].dot(Point(x))) > 1 + 1e-10) ok = false;
                if (ok) best = std::max(best, x.norm());
            }
        }
        int k = d - 1;
        while (k >= 0 && idx[k] == m - d + k) --k;
        if (k < 0) break;
        ++idx[k];
        for (int j = k + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

}  // namespace

double direction_spread(const std::vector<Point>& dirs) {
    if (dirs.empty()) return 0;
    const int d = static_cast<int>(dirs[0].size());
    const int m = static_cast<int>(dirs.size());
    Mat S(m, d);
    for (int i = 0; i < m; ++i) S.row(i) = dirs[i].transpose();
    Eigen::JacobiSVD<Mat> svd(S);
    const auto& sv = svd.singularValues();
    if (sv.size() < d || sv[d - 1] <= 1e-12 * sv[0]) return 0;

    if (binomial_count(m, d) * (1L << d) <= 400000) {
        double r = max_vertex_norm(dirs, d);
        return r > 0 ? 1.0 / r : 0.0;
    }
    // large sets: dense sampling of the sphere, then coordinate refinement
    Rng rng(12345);
    double best = kInf;
    Point arg;
    auto score = [&](const Point& x) {
        double mx = 0;
        for (const auto& xi : dirs) mx = std::max(mx, std::abs(xi.dot(x)));
        return mx;
    };
    for (int k = 0; k < 20000; ++k) {
        Point x = rng.unit_vector(d);
        double s = score(x);
        if (s < best) {
            best = s;
            arg = x;
        }
    }
    double step = 0.05;
    while (step > 1e-10) {
        bool improved = false;
        for (int k = 0; k < 4 * d; ++k) {
            Point y = arg + step * rng.unit_vector(d);
            y.normalize();
            double s = score(y);
            if (s < best) {
                best = s;
                arg = y;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

DirectionSet::DirectionSet(std::vector<Point> raw) {
    if (raw.empty()) throw PreconditionError("DirectionSet: empty");
    const int d = static_cast<int>(raw[0].size());
    for (auto& v : raw) {
        require_dim(d, static_cast<int>(v.size()), "DirectionSet");
        double n = v.norm();
        if (!(n > 0) || !std::isfinite(n)) throw PreconditionError("DirectionSet: zero or non-finite direction");
        v /= n;
    }
    dirs = std::move(raw);
    Mat S(static_cast<int>(dirs.size()), d);
    for (int i = 0; i < size(); ++i) S.row(i) = dirs[i].transpose();
    Eigen::FullPivLU<Mat> lu(S);
    lu.setThreshold(1e-12);
    rank = static_cast<int>(lu.rank());
    spread = direction_spread(dirs);
}

DirectionSet DirectionSet::axes(int d) {
    std::vector<Point> v;
    for (int i = 0; i < d; ++i) {
        Point e = Point::Zero(d);
        e[i] = 1;
        v.push_back(e);
    }
    return DirectionSet(v);
}

DirectionSet DirectionSet::symmetrized() const {
    std::vector<Point> v = dirs;
    for (const auto& xi : dirs) {
        Point m = -xi;
        bool present = false;
        for (const auto& w : v)
            if ((w - m).norm() <= 1e-12) present = true;
        if (!present) v.push_back(m);
    }
    return DirectionSet(v);
}

DirectionSet DirectionSet::with(const Point& extra) const {
    std::vector<Point> v = dirs;
    v.push_back(extra);
    return DirectionSet(v);
}

bool DirectionSet::contains(const Point& v, double tol, bool allow_negation) const {
    double n = v.norm();
    if (!(n > 0)) return false;
    Point u = v / n;
    for (const auto& xi : dirs) {
        if ((u - xi).norm() <= tol) return true;
        if (allow_negation && (u + xi).norm() <= tol) return true;
    }
    return false;
}

}  // namespace wlab
