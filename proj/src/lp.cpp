#include "wlab/lp.hpp"

#include <algorithm>
#include <vector>

namespace wlab {

namespace {

// Standard form: min g.y  s.t.  M y = q, y >= 0, with q >= 0 after row flips.
// Columns N..N+n-1 are artificials.
class RevisedSimplex {
public:
    RevisedSimplex(Mat M, Vec q, Vec g) : M_(std::move(M)), q_(std::move(q)), g_(std::move(g)) {
        n_ = static_cast<int>(M_.rows());
        N_ = static_cast<int>(M_.cols());
        colnorm_.resize(N_);
        for (int j = 0; j < N_; ++j) colnorm_[j] = std::max(M_.col(j).norm(), 1e-300);
        basis_.resize(n_);
        in_basis_.assign(N_ + n_, 0);
        for (int i = 0; i < n_; ++i) {
            basis_[i] = N_ + i;
            in_basis_[N_ + i] = 1;
        }
        Binv_ = Mat::Identity(n_, n_);
        xB_ = q_;
        max_iters_ = 50 * (n_ + N_) + 2000;
    }

    enum class Outcome { optimal, unbounded, iteration_limit };

    Outcome phase(const Vec& cost, bool artificials_may_enter) {
        int degenerate_run = 0;
        bool bland = false;
        int since_refactor = 0;
        for (;;) {
            if (iters_ >= max_iters_) return Outcome::iteration_limit;
            if (since_refactor >= 64) {
                refactor();
                since_refactor = 0;
            }
            Vec cB(n_);
            for (int i = 0; i < n_; ++i) cB[i] = cost[basis_[i]];
            Vec pi = Binv_.transpose() * cB;
            Vec dstruct = cost.head(N_) - M_.transpose() * pi;
            // reduced-cost tolerance relative to each column's own scale
            const double pimax = pi.cwiseAbs().maxCoeff();
            auto tol_of = [&](int j, double cn) { return 1e-10 * std::max({1.0, std::abs(cost[j]), cn * pimax}); };

            int enter = -1;
            double best = 0;
            for (int j = 0; j < N_; ++j) {
                if (in_basis_[j]) continue;
                double dj = dstruct[j];
                if (dj >= -tol_of(j, colnorm_[j])) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                double score = dj / colnorm_[j];
                if (score < best) {
                    best = score;
                    enter = j;
                }
            }
            if (enter < 0 && artificials_may_enter) {
                for (int i = 0; i < n_; ++i) {
                    int j = N_ + i;
                    if (in_basis_[j]) continue;
                    double dj = cost[j] - pi[i];
                    if (dj < -tol_of(j, 1.0) && (enter < 0 || dj < best)) {
                        best = dj;
                        enter = j;
                        if (bland) break;
                    }
                }
            }
            if (enter < 0) return Outcome::optimal;

            Vec alpha = Binv_ * column(enter);
            double amax = alpha.cwiseAbs().maxCoeff();
            const double piv_tol = 1e-9 * std::max(1.0, amax);
            int leave = -1;
            double theta = kInf;
            for (int i = 0; i < n_; ++i) {
                if (alpha[i] <= piv_tol) continue;
                double ratio = std::max(xB_[i], 0.0) / alpha[i];
                if (leave < 0 || ratio < theta - 1e-12 * (1 + std::abs(theta))) {
                    theta = ratio;
                    leave = i;
                } else if (ratio <= theta + 1e-12 * (1 + std::abs(theta))) {
                    bool take = bland ? basis_[i] < basis_[leave] : alpha[i] > alpha[leave];
                    if (take) leave = i;
                }
            }
            if (leave < 0) return Outcome::unbounded;
            pivot(leave, enter, alpha);
            ++iters_;
            ++since_refactor;
            if (theta <= 1e-14) {
                if (++degenerate_run > 40) bland = true;
            } else {
                degenerate_run = 0;
                bland = false;
            }
        }
    }

    // After phase one, swap zero-level artificials for structural columns where possible.
    void drive_out_artificials() {
        for (int r = 0; r < n_; ++r) {
            if (basis_[r] < N_) continue;
            Eigen::RowVectorXd row = Binv_.row(r) * M_;
            int enter = -1;
            double best = 1e-9;
            for (int j = 0; j < N_; ++j) {
                if (in_basis_[j]) continue;
                double v = std::abs(row[j]) / colnorm_[j];
                if (v > best) {
                    best = v;
                    enter = j;
                }
            }
            if (enter < 0) continue;  // redundant row
            Vec alpha = Binv_ * column(enter);
            pivot(r, enter, alpha);
        }
        refactor();
    }

    void refactor() {
        Mat B(n_, n_);
        for (int i = 0; i < n_; ++i) B.col(i) = column(basis_[i]);
        Binv_ = B.partialPivLu().inverse();
        xB_ = Binv_ * q_;
    }

    Vec multipliers(const Vec& cost) const {
        Vec cB(n_);
        for (int i = 0; i < n_; ++i) cB[i] = cost[basis_[i]];
        return Binv_.transpose() * cB;
    }

    double artificial_sum() const {
        double s = 0;
        for (int i = 0; i < n_; ++i)
            if (basis_[i] >= N_) s += std::max(xB_[i], 0.0);
        return s;
    }

    Vec structural_values() const {
        Vec y = Vec::Zero(N_);
        for (int i = 0; i < n_; ++i)
            if (basis_[i] < N_) y[basis_[i]] = std::max(xB_[i], 0.0);
        return y;
    }

    int n() const { return n_; }
    int N() const { return N_; }
    int iterations() const { return iters_; }

private:
    Vec column(int j) const {
        if (j < N_) return M_.col(j);
        Vec e = Vec::Zero(n_);
        e[j - N_] = 1.0;
        return e;
    }

    void pivot(int r, int enter, Vec alpha) {
        double ar = alpha[r];
        double theta = xB_[r] / ar;
        Binv_.row(r) /= ar;
        alpha[r] = 0;
        Binv_.noalias() -= alpha * Binv_.row(r);
        xB_ -= theta * alpha;
        xB_[r] = theta;
        in_basis_[basis_[r]] = 0;
        basis_[r] = enter;
        in_basis_[enter] = 1;
    }

    Mat M_;
    Vec q_, g_;
    int n_ = 0, N_ = 0;
    std::vector<double> colnorm_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    Mat Binv_;
    Vec xB_;
    int iters_ = 0;
    int max_iters_ = 0;
};

}  // namespace

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
        case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "unknown";
}

LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c) {
    const int m = static_cast<int>(A.rows());
    const int d = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != d) throw DimensionError("solve_lp: inconsistent sizes");

    LpResult out;
    if (m == 0) {
        out.status = c.isZero() ? LpStatus::optimal : LpStatus::unbounded;
        out.x = Vec::Zero(d);
        out.y = Vec();
        return out;
    }

    // Dual: min b.y s.t. A^T y = -c, y >= 0.
    Mat M = A.transpose();
    Vec q = -c;
    Vec flip = Vec::Ones(d);
    for (int i = 0; i < d; ++i) {
        if (q[i] < 0) {
            q[i] = -q[i];
            M.row(i) *= -1.0;
            flip[i] = -1.0;
        }
    }

    RevisedSimplex sx(M, q, b);
    Vec cost1 = Vec::Zero(m + d);
    cost1.tail(d).setOnes();
    auto o1 = sx.phase(cost1, false);
    out.iterations = sx.iterations();
    if (o1 == RevisedSimplex::Outcome::iteration_limit) {
        out.status = LpStatus::iteration_limit;
        return out;
    }
    sx.refactor();
    double feas_tol = 1e-9 * std::max(1.0, q.cwiseAbs().maxCoeff());
    if (sx.artificial_sum() > feas_tol) {
        // dual infeasible: the primal is unbounded (or itself infeasible)
        out.status = LpStatus::unbounded;
        return out;
    }
    sx.drive_out_artificials();

    Vec cost2 = Vec::Zero(m + d);
    cost2.head(m) = b;
    auto o2 = sx.phase(cost2, false);
    out.iterations = sx.iterations();
    if (o2 == RevisedSimplex::Outcome::iteration_limit) {
        out.status = LpStatus::iteration_limit;
        return out;
    }
    if (o2 == RevisedSimplex::Outcome::unbounded) {
        out.status = LpStatus::infeasible;
        return out;
    }
    sx.refactor();
    Vec pi = sx.multipliers(cost2);
    out.x = pi.cwiseProduct(flip);
    out.y = sx.structural_values();
    out.objective = c.dot(out.x);
    out.dual_objective = -b.dot(out.y);
    out.status = LpStatus::optimal;
    return out;
}

}  // namespace wlab
