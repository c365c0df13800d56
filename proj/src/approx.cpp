#include "wlab/approx.hpp"

#include "wlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wlab {

const char* to_string(ApproxStatus s) {
    switch (s) {
        case ApproxStatus::optimal: return "optimal";
        case ApproxStatus::local_optimum: return "local_optimum";
        case ApproxStatus::max_iter: return "max_iter";
    }
    return "?";
}

namespace {

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double objective(const Mat& V, const Vec& y, const Vec& w, double p, const Vec& c) {
    return lp_norm(to_std(y - V * c), to_std(w), p);
}

// Weighted least squares with column equilibration.
Vec wls(const Mat& V, const Vec& y, const Vec& sw, const Vec& colscale) {
    Mat A = sw.asDiagonal() * V * colscale.asDiagonal();
    Vec b = sw.cwiseProduct(y);
    Vec z = A.colPivHouseholderQr().solve(b);
    return colscale.cwiseProduct(z);
}

// Reweighting loop shared by 1 <= p < inf (plain) and p < 1 (damped).
Vec irls(const Mat& V, const Vec& y, const Vec& w, double p, Vec c, const Vec& colscale, const ApproxOptions& opt,
         double damping, int max_iter, int& iters, bool& converged) {
    converged = false;
    for (iters = 0; iters < max_iter; ++iters) {
        Vec res = (y - V * c).cwiseAbs();
        double rmax = res.maxCoeff();
        if (rmax == 0) {
            converged = true;
            break;
        }
        double floor = opt.weight_clamp * rmax;
        Vec sw(res.size());
        for (int i = 0; i < res.size(); ++i) sw[i] = std::sqrt(w[i] * std::pow(std::max(res[i], floor), p - 2));
        Vec next = wls(V, y, sw, colscale);
        if (damping > 0) next = damping * c + (1 - damping) * next;
        double change = (next - c).norm();
        c = next;
        if (change <= opt.coeff_tol * std::max(1.0, c.norm())) {
            converged = true;
            ++iters;
            break;
        }
    }
    return c;
}

// Interpolate the n_basis points of smallest residual and keep the result when it improves.
// Minimizers of the p <= 1 objective sit at such interpolation vertices.
Vec vertex_polish(const Mat& V, const Vec& y, const Vec& w, double p, Vec c, int rounds) {
    const int k = static_cast<int>(V.cols());
    double best = objective(V, y, w, p, c);
    for (int it = 0; it < rounds; ++it) {
        Vec res = (y - V * c).cwiseAbs();
        std::vector<int> ord(res.size());
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return res[a] < res[b]; });
        Mat S(k, k);
        Vec t(k);
        int got = 0;
        for (std::size_t q = 0; q < ord.size() && got < k; ++q) {
            S.row(got) = V.row(ord[q]);
            t[got] = y[ord[q]];
            if (Eigen::FullPivLU<Mat>(S.topRows(got + 1)).rank() == got + 1) ++got;
        }
        if (got < k) break;
        Vec cand = S.fullPivLu().solve(t);
        double v = objective(V, y, w, p, cand);
        if (!(v < best * (1 - 1e-15))) break;
        best = v;
        c = cand;
    }
    return c;
}

// Vertex exchange: swap one interpolation point at a time for a nearby-residual candidate
// while the p < 1 objective improves.
Vec vertex_exchange(const Mat& V, const Vec& y, const Vec& w, double p, Vec c, int budget) {
    const int k = static_cast<int>(V.cols()), n = static_cast<int>(V.rows());
    if (n <= k) return c;
    double best = objective(V, y, w, p, c);
    auto rank_by_residual = [&](const Vec& cc) {
        Vec res = (y - V * cc).cwiseAbs();
        std::vector<int> ord(n);
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return res[a] < res[b]; });
        return ord;
    };
    int evals = 0;
    bool improved = true;
    while (improved && evals < budget) {
        improved = false;
        auto ord = rank_by_residual(c);
        std::vector<int> S(ord.begin(), ord.begin() + k);
        const int M = std::min(n, 4 * k + 8);
        for (int i = 0; i < k && !improved && evals < budget; ++i)
            for (int q = k; q < M && !improved && evals < budget; ++q) {
                std::vector<int> T = S;
                T[i] = ord[q];
                Mat A(k, k);
                Vec t(k);
                for (int a = 0; a < k; ++a) {
                    A.row(a) = V.row(T[a]);
                    t[a] = y[T[a]];
                }
                Eigen::FullPivLU<Mat> lu(A);
                ++evals;
                if (lu.rank() < k) continue;
                Vec cand = lu.solve(t);
                double v = objective(V, y, w, p, cand);
                if (v < best * (1 - 1e-14)) {
                    best = v;
                    c = cand;
                    improved = true;
                }
            }
    }
    return c;
}

}  // namespace

namespace {
ApproxResult fit_normalized(const Mat& V, const Vec& y, const Vec& w, double p, const ApproxOptions& opt);
}

// The data are divided by their extreme value (with sign) first, so c*f and f follow the
// same solver path and the attained errors scale exactly.
ApproxResult best_fit(const Mat& V, const Vec& y, const Vec& w, double p, const ApproxOptions& opt) {
    if (y.size() == 0) throw PreconditionError("best_approx: empty sample plan");
    Eigen::Index imax;
    y.cwiseAbs().maxCoeff(&imax);
    double s = y[imax];
    if (s == 0 || !std::isfinite(s)) return fit_normalized(V, y, w, p, opt);
    Vec yn = y / s;
    // The p < 1 search branches on residual comparisons; snapping the data to a 2^-40 grid
    // keeps roundoff in c*f from steering it to a different local optimum.
    if (p < 1)
        for (int i = 0; i < yn.size(); ++i) yn[i] = std::ldexp(std::nearbyint(std::ldexp(yn[i], 40)), -40);
    ApproxResult out = fit_normalized(V, yn, w, p, opt);
    if (p < 1) out.coeffs = vertex_exchange(V, y / s, w, p, out.coeffs, 200);
    out.coeffs *= s;
    out.error = objective(V, y, w, p, out.coeffs);
    out.duality_gap *= std::abs(s);
    return out;
}

namespace {

ApproxResult fit_normalized(const Mat& V, const Vec& y, const Vec& w, double p, const ApproxOptions& opt) {
    if (!(p > 0)) throw PreconditionError("best_approx: p must be positive");
    const int n = static_cast<int>(V.rows()), k = static_cast<int>(V.cols());
    if (n == 0) throw PreconditionError("best_approx: empty sample plan");
    if (y.size() != n || w.size() != n) throw DimensionError("best_approx: data sizes differ");
    Vec colscale(k);
    for (int j = 0; j < k; ++j) {
        double s = V.col(j).cwiseAbs().maxCoeff();
        colscale[j] = s > 0 ? 1.0 / s : 1.0;
    }
    {
        Mat A = w.cwiseSqrt().asDiagonal() * V * colscale.asDiagonal();
        Eigen::ColPivHouseholderQR<Mat> qr(A);
        qr.setThreshold(1e-10);
        if (qr.rank() < k)
            throw PreconditionError("best_approx: design matrix is rank deficient on this plan (rank " +
                                    std::to_string(qr.rank()) + " < " + std::to_string(k) + "); use a denser plan");
    }
    ApproxResult out;
    out.p = p;
    if (p == 2) {
        out.coeffs = wls(V, y, w.cwiseSqrt(), colscale);
        // one step of iterative refinement
        Vec r = y - V * out.coeffs;
        out.coeffs += wls(V, r, w.cwiseSqrt(), colscale);
        out.status = ApproxStatus::optimal;
        out.iterations = 1;
    } else if (std::isinf(p)) {
        // variables (z, s) with c = colscale * z: min s s.t. |y - V c| <= s
        Mat Vs = V * colscale.asDiagonal();
        double ys = std::max(1e-300, y.cwiseAbs().maxCoeff());
        Mat A(2 * n, k + 1);
        A.topLeftCorner(n, k) = Vs;
        A.bottomLeftCorner(n, k) = -Vs;
        A.col(k).setConstant(-1);
        Vec b(2 * n);
        b.head(n) = y / ys;
        b.tail(n) = -y / ys;
        Vec cost = Vec::Zero(k + 1);
        cost[k] = 1;
        LpResult lp = solve_lp(A, b, cost);
        if (lp.status == LpStatus::iteration_limit) throw ConvergenceError("best_approx: uniform-norm LP hit its iteration limit");
        if (lp.status != LpStatus::optimal) throw ConvergenceError(std::string("best_approx: uniform-norm LP ") + to_string(lp.status));
        out.coeffs = colscale.cwiseProduct(lp.x.head(k)) * ys;
        out.duality_gap = std::abs(lp.objective - lp.dual_objective) * ys;
        out.iterations = lp.iterations;
        out.status = ApproxStatus::optimal;
    } else {
        Vec c2 = wls(V, y, w.cwiseSqrt(), colscale);
        bool conv = false;
        int it = 0;
        double p1 = std::max(p, 1.0);
        Vec c = irls(V, y, w, p1, c2, colscale, opt, 0.0, opt.max_iter, it, conv);
        out.iterations = it;
        if (p1 == 1) c = vertex_polish(V, y, w, 1.0, c, 8);
        if (p >= 1) {
            out.coeffs = c;
            out.status = conv ? ApproxStatus::optimal : ApproxStatus::max_iter;
        } else {
            int it2 = 0;
            Vec best = irls(V, y, w, p, c, colscale, opt, 0.5, opt.max_iter, it2, conv);
            best = vertex_polish(V, y, w, p, best, 16);
            double bv = objective(V, y, w, p, best);
            out.iterations += it2;
            Rng rng(opt.seed);
            double spread = std::max(1e-3, 0.1 * (y - V * best).cwiseAbs().maxCoeff());
            for (int q = 0; q < opt.perturbations; ++q) {
                Vec start = best;
                for (int j = 0; j < k; ++j) start[j] += spread * colscale[j] * rng.normal();
                int itq = 0;
                bool cq = false;
                Vec cand = irls(V, y, w, p, start, colscale, opt, 0.5, 50, itq, cq);
                cand = vertex_polish(V, y, w, p, cand, 16);
                out.iterations += itq;
                double v = objective(V, y, w, p, cand);
                if (v < bv) {
                    bv = v;
                    best = cand;
                }
            }
            out.coeffs = vertex_exchange(V, y, w, p, best, 2000);
            out.status = ApproxStatus::local_optimum;
        }
    }
    out.error = objective(V, y, w, p, out.coeffs);
    return out;
}

}  // namespace

ApproxResult best_approx(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const PolySpaceBasis& basis,
                         double p, const ApproxOptions& opt) {
    require_dim(dom.dim(), basis.d, "best_approx");
    require_dim(dom.dim(), f.dim(), "best_approx");
    if (plan.points.empty()) throw PreconditionError("best_approx: empty sample plan");
    Mat V = basis_values(basis, plan.points);
    Vec y(plan.size()), w(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        y[i] = f(plan.points[i]);
        w[i] = plan.weights[i];
    }
    return best_fit(V, y, w, p, opt);
}

ApproxResult best_approx_1d(const std::vector<Sample1d>& samples, int r, double p, const ApproxOptions& opt) {
    if (r < 1) throw PreconditionError("best_approx_1d: order must be >= 1");
    std::vector<double> ts;
    for (const auto& s : samples) ts.push_back(s.t);
    std::sort(ts.begin(), ts.end());
    int distinct = ts.empty() ? 0 : 1;
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (ts[i] != ts[i - 1]) ++distinct;
    if (distinct < r)
        throw PreconditionError("best_approx_1d: need at least " + std::to_string(r) + " distinct abscissae, got " +
                                std::to_string(distinct));
    // work in s = (t - mid) / half for conditioning, convert back at the end
    double lo = ts.front(), hi = ts.back();
    double mid = 0.5 * (lo + hi), half = hi > lo ? 0.5 * (hi - lo) : 1.0;
    const int n = static_cast<int>(samples.size());
    Mat V(n, r);
    Vec y(n), w(n);
    for (int i = 0; i < n; ++i) {
        double s = (samples[i].t - mid) / half, pw = 1;
        for (int q = 0; q < r; ++q, pw *= s) V(i, q) = pw;
        y[i] = samples[i].v;
        w[i] = samples[i].w;
    }
    ApproxResult res = best_fit(V, y, w, p, opt);
    // sum_q a_q ((t - mid)/half)^q  ->  powers of t
    Vec c = Vec::Zero(r);
    for (int q = 0; q < r; ++q) {
        double aq = res.coeffs[q] / std::pow(half, q);
        for (int j = 0; j <= q; ++j) c[j] += aq * binomial(q, j) * std::pow(-mid, q - j);
    }
    res.coeffs = c;
    return res;
}

}  // namespace wlab
