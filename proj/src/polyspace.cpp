#include "wlab/polyspace.hpp"

#include <algorithm>
#include <map>

namespace wlab {

int total_degree(const Exponent& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

namespace {

void fill_degree(int d, int i, int left, Exponent& cur, std::vector<Exponent>& out) {
    if (i == d - 1) {
        cur[i] = left;
        out.push_back(cur);
        return;
    }
    for (int k = left; k >= 0; --k) {
        cur[i] = k;
        fill_degree(d, i + 1, left - k, cur, out);
    }
}

std::map<Exponent, int> index_of(const std::vector<Exponent>& ex) {
    std::map<Exponent, int> m;
    for (std::size_t i = 0; i < ex.size(); ++i) m.emplace(ex[i], static_cast<int>(i));
    return m;
}

// Neumaier's variant of Kahan summation.
struct Neumaier {
    double sum = 0, comp = 0;
    void add(double v) {
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// powers[i][k] = x_i^k
std::vector<std::vector<double>> power_table(const Point& x, int max_deg) {
    std::vector<std::vector<double>> pw(x.size(), std::vector<double>(max_deg + 1, 1.0));
    for (int i = 0; i < x.size(); ++i)
        for (int k = 1; k <= max_deg; ++k) pw[i][k] = pw[i][k - 1] * x[i];
    return pw;
}

int max_degree(const std::vector<Exponent>& ex) {
    int m = 0;
    for (const auto& a : ex) m = std::max(m, total_degree(a));
    return m;
}

}  // namespace

std::vector<Exponent> graded_monomials(int d, int max_degree) {
    if (d < 1) throw PreconditionError("graded_monomials: dimension must be positive");
    std::vector<Exponent> out;
    Exponent cur(d, 0);
    for (int deg = 0; deg <= max_degree; ++deg) fill_degree(d, 0, deg, cur, out);
    return out;
}

Mat directional_power_matrix(const std::vector<Exponent>& exponents, const Point& xi, int r) {
    const int n = static_cast<int>(exponents.size());
    if (r < 0) throw PreconditionError("directional_power_derivative: order must be >= 0");
    if (r == 0) return Mat::Identity(n, n);
    const int d = static_cast<int>(xi.size());
    auto idx = index_of(exponents);
    Mat D = Mat::Zero(n, n);
    for (int c = 0; c < n; ++c) {
        const Exponent& a = exponents[c];
        require_dim(d, static_cast<int>(a.size()), "directional_power_derivative");
        for (int i = 0; i < d; ++i) {
            if (a[i] == 0 || xi[i] == 0) continue;
            Exponent b = a;
            --b[i];
            auto it = idx.find(b);
            if (it == idx.end())
                throw PreconditionError("directional_power_derivative: exponent list is not closed under differentiation");
            D(it->second, c) += xi[i] * a[i];
        }
    }
    Mat out = D;
    for (int k = 1; k < r; ++k) out = D * out;
    return out;
}

Vec directional_power_derivative(const std::vector<Exponent>& exponents, const Vec& poly, const Point& xi, int r) {
    if (poly.size() != static_cast<Eigen::Index>(exponents.size()))
        throw DimensionError("directional_power_derivative: coefficient length does not match exponent list");
    if (r == 0) return poly;
    return directional_power_matrix(exponents, xi, r) * poly;
}

PolySpaceBasis build_basis(int d, int r, const DirectionSet& E) {
    if (r < 1) throw PreconditionError("build_basis: order must be >= 1");
    if (E.size() == 0) throw PreconditionError("build_basis: empty direction set");
    require_dim(d, E.dim(), "build_basis");
    if (!E.spans())
        throw PreconditionError("build_basis: direction set does not span R^d; the restricted space is infinite-dimensional");
    PolySpaceBasis B;
    B.d = d;
    B.r = r;
    B.dirset = E;
    B.exponents = graded_monomials(d, d * (r - 1));
    const int n = B.n_monomials();

    Mat stacked(static_cast<Eigen::Index>(n) * E.size(), n);
    for (int k = 0; k < E.size(); ++k) stacked.middleRows(static_cast<Eigen::Index>(k) * n, n) = directional_power_matrix(B.exponents, E.dirs[k], r);

    Mat null;
    double smax = stacked.cwiseAbs().maxCoeff();
    if (smax == 0) {
        null = Mat::Identity(n, n);
    } else {
        // Divide-and-conquer SVD loses the small singular values these integer-like
        // matrices produce; Jacobi is accurate and still fast at these sizes.
        auto nullspace = [&](const auto& svd) {
            const Vec& sv = svd.singularValues();
            double cut = kNullspaceCutoff * sv[0];
            int rank = 0;
            while (rank < sv.size() && sv[rank] > cut) ++rank;
            return Mat(svd.matrixV().rightCols(n - rank));
        };
        if (n <= 400)
            null = nullspace(Eigen::JacobiSVD<Mat>(stacked, Eigen::ComputeFullV));
        else
            null = nullspace(Eigen::BDCSVD<Mat>(stacked, Eigen::ComputeFullV));
    }
    // Gauss-Jordan with complete pivoting before Gram-Schmidt, so rows lean on
    // low-order monomials and do not depend on the SVD's rotation choice.
    Mat Nt = null.transpose();
    const int k = static_cast<int>(Nt.rows());
    std::vector<bool> used(n, false);
    for (int row = 0; row < k; ++row) {
        int pr = row, pc = -1;
        double best = 0;
        for (int c = 0; c < n; ++c) {
            if (used[c]) continue;
            for (int i = row; i < k; ++i)
                if (std::abs(Nt(i, c)) > best * (1 + 1e-9)) {
                    best = std::abs(Nt(i, c));
                    pr = i;
                    pc = c;
                }
        }
        if (pc < 0) break;
        used[pc] = true;
        Nt.row(row).swap(Nt.row(pr));
        Nt.row(row) /= Nt(row, pc);
        for (int i = 0; i < k; ++i)
            if (i != row) Nt.row(i) -= Nt(i, pc) * Nt.row(row);
    }
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < i; ++j) Nt.row(i) -= Nt.row(i).dot(Nt.row(j)) * Nt.row(j);
        for (int j = 0; j < i; ++j) Nt.row(i) -= Nt.row(i).dot(Nt.row(j)) * Nt.row(j);
        Nt.row(i).normalize();
    }
    // clean roundoff dust so exported bases are readable
    for (int i = 0; i < Nt.rows(); ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(Nt(i, j)) < 1e-15) Nt(i, j) = 0;
    B.coeffs = Nt;
    return B;
}

double evaluate_monomials(const std::vector<Exponent>& exponents, const Vec& poly, const Point& x) {
    if (poly.size() != static_cast<Eigen::Index>(exponents.size()))
        throw DimensionError("evaluate: coefficient length does not match exponent list");
    if (exponents.empty()) return 0;
    require_dim(static_cast<int>(exponents[0].size()), static_cast<int>(x.size()), "evaluate");
    auto pw = power_table(x, max_degree(exponents));
    Neumaier acc;
    for (std::size_t m = 0; m < exponents.size(); ++m) {
        if (poly[m] == 0) continue;
        double t = poly[m];
        for (int i = 0; i < x.size(); ++i) t *= pw[i][exponents[m][i]];
        acc.add(t);
    }
    return acc.value();
}

Vec to_monomial(const PolySpaceBasis& basis, const Vec& coeffs) {
    if (coeffs.size() != basis.size()) throw DimensionError("evaluate: coefficient vector length must equal n_basis");
    return basis.coeffs.transpose() * coeffs;
}

double evaluate(const PolySpaceBasis& basis, const Vec& coeffs, const Point& x) {
    require_dim(basis.d, static_cast<int>(x.size()), "evaluate");
    return evaluate_monomials(basis.exponents, to_monomial(basis, coeffs), x);
}

Mat basis_values(const PolySpaceBasis& basis, const std::vector<Point>& points) {
    const int n = basis.n_monomials();
    const int md = max_degree(basis.exponents);
    Mat mono(points.size(), n);
    for (std::size_t k = 0; k < points.size(); ++k) {
        require_dim(basis.d, static_cast<int>(points[k].size()), "basis_values");
        auto pw = power_table(points[k], md);
        for (int m = 0; m < n; ++m) {
            double t = 1;
            for (int i = 0; i < basis.d; ++i) t *= pw[i][basis.exponents[m][i]];
            mono(k, m) = t;
        }
    }
    return mono * basis.coeffs.transpose();
}

double membership_residual(const PolySpaceBasis& basis, const Vec& poly) {
    if (poly.size() != basis.n_monomials()) throw DimensionError("membership_residual: coefficient length mismatch");
    Vec proj = basis.coeffs.transpose() * (basis.coeffs * poly);
    return (poly - proj).norm();
}

double annihilation_residual(const PolySpaceBasis& basis) {
    double worst = 0;
    for (const auto& xi : basis.dirset.dirs) {
        Mat D = directional_power_matrix(basis.exponents, xi, basis.r);
        for (int i = 0; i < basis.size(); ++i)
            worst = std::max(worst, (D * basis.coeffs.row(i).transpose()).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace wlab
