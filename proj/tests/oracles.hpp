#pragma once
// Independent reference computations shared by the unit and acceptance tests.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <vector>

namespace oracle {

using Q = boost::multiprecision::cpp_rational;
using Mono = std::vector<int>;

// All exponents of total degree <= deg, any order.
inline std::vector<Mono> monomials(int d, int deg) {
    std::vector<Mono> out;
    Mono cur(d, 0);
    for (;;) {
        int s = 0;
        for (int v : cur) s += v;
        if (s <= deg) out.push_back(cur);
        int i = 0;
        while (i < d && ++cur[i] > deg) cur[i++] = 0;
        if (i == d) break;
    }
    return out;
}

// Polynomial as a sparse map exponent -> rational coefficient.
using Poly = std::map<Mono, Q>;

inline Poly directional_derivative(const Poly& p, const std::vector<Q>& dir) {
    Poly out;
    for (const auto& [a, c] : p)
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 0 || dir[i] == 0) continue;
            Mono b = a;
            --b[i];
            out[b] += c * a[i] * dir[i];
        }
    return out;
}

inline int rank(std::vector<std::vector<Q>> M) {
    if (M.empty()) return 0;
    const std::size_t cols = M[0].size();
    std::size_t row = 0;
    for (std::size_t c = 0; c < cols && row < M.size(); ++c) {
        std::size_t piv = row;
        while (piv < M.size() && M[piv][c] == 0) ++piv;
        if (piv == M.size()) continue;
        std::swap(M[row], M[piv]);
        for (std::size_t i = row + 1; i < M.size(); ++i) {
            if (M[i][c] == 0) continue;
            Q f = M[i][c] / M[row][c];
            for (std::size_t j = c; j < cols; ++j) M[i][j] -= f * M[row][j];
        }
        ++row;
    }
    return static_cast<int>(row);
}

// dim of {P : deg P <= d(r-1), D_xi^r P = 0 for xi in dirs} with integer (unnormalized) directions.
inline int restricted_dimension(int d, int r, const std::vector<std::vector<int>>& dirs) {
    auto mons = monomials(d, d * (r - 1));
    std::map<Mono, std::size_t> col;
    for (std::size_t i = 0; i < mons.size(); ++i) col[mons[i]] = i;
    std::vector<std::vector<Q>> rows;
    for (const auto& dv : dirs) {
        std::vector<Q> dir(dv.begin(), dv.end());
        std::vector<Poly> images;
        for (const auto& m : mons) {
            Poly p{{m, Q(1)}};
            for (int k = 0; k < r; ++k) p = directional_derivative(p, dir);
            images.push_back(p);
        }
        // row per output monomial
        for (const auto& out : mons) {
            std::vector<Q> row(mons.size(), Q(0));
            bool any = false;
            for (std::size_t c = 0; c < mons.size(); ++c) {
                auto it = images[c].find(out);
                if (it != images[c].end() && it->second != 0) {
                    row[c] = it->second;
                    any = true;
                }
            }
            if (any) rows.push_back(row);
        }
    }
    return static_cast<int>(mons.size()) - rank(rows);
}

inline double binomial(int n, int k) {
    double b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace oracle
