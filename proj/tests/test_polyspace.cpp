#include <doctest.h>

#include "oracles.hpp"
#include "wlab/polyspace.hpp"

#include <cmath>

using namespace wlab;

namespace {

Point P(std::initializer_list<double> xs) { return make_point(xs); }

int index_of(const std::vector<Exponent>& ex, const Exponent& a) {
    for (std::size_t i = 0; i < ex.size(); ++i)
        if (ex[i] == a) return static_cast<int>(i);
    return -1;
}

Vec mono(const std::vector<Exponent>& ex, const Exponent& a) {
    Vec v = Vec::Zero(ex.size());
    v[index_of(ex, a)] = 1;
    return v;
}

DirectionSet axes_plus_diagonal(int d) { return DirectionSet::axes(d).with(Point::Constant(d, 1.0 / std::sqrt(d))); }

Mat random_matrix(Rng& rng, int d) {
    for (;;) {
        Mat M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = rng.uniform(-1, 1);
        if (std::abs(M.determinant()) > 0.1) return M;
    }
}

DirectionSet mapped(const DirectionSet& E, const Mat& A) {
    std::vector<Point> v;
    for (const auto& xi : E.dirs) {
        Point y = A * xi;
        v.push_back(y / y.norm());
    }
    return DirectionSet(v);
}

}  // namespace

TEST_CASE("graded monomial order") {
    auto ex = graded_monomials(2, 2);
    REQUIRE(ex.size() == 6);
    CHECK(ex[0] == Exponent{0, 0});
    CHECK(ex[1] == Exponent{1, 0});
    CHECK(ex[2] == Exponent{0, 1});
    CHECK(ex[3] == Exponent{2, 0});
    CHECK(ex[4] == Exponent{1, 1});
    CHECK(ex[5] == Exponent{0, 2});
    for (int d = 1; d <= 4; ++d)
        for (int k = 0; k <= 5; ++k) CHECK(graded_monomials(d, k).size() == oracle::binomial(d + k, d));
}

TEST_CASE("directional power derivative") {
    auto ex1 = graded_monomials(1, 2);
    Vec x2 = mono(ex1, {2});
    Vec r = directional_power_derivative(ex1, x2, P({1}), 2);
    CHECK(r[index_of(ex1, {0})] == doctest::Approx(2));
    CHECK(r.cwiseAbs().sum() == doctest::Approx(2));

    auto ex2 = graded_monomials(2, 2);
    Vec xy = mono(ex2, {1, 1});
    Vec s = directional_power_derivative(ex2, xy, P({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}), 2);
    CHECK(s[0] == doctest::Approx(1).epsilon(1e-14));
    CHECK(s.cwiseAbs().sum() == doctest::Approx(1).epsilon(1e-14));

    Rng rng(3);
    Vec any = Vec::Zero(ex2.size());
    for (int i = 0; i < any.size(); ++i) any[i] = rng.normal();
    CHECK(directional_power_derivative(ex2, any, P({0.6, 0.8}), 0) == any);

    // missing lower-degree monomial
    std::vector<Exponent> gap = {{0, 0}, {2, 0}};
    CHECK_THROWS_AS(directional_power_derivative(gap, Vec::Ones(2), P({1, 0}), 1), PreconditionError);
}

TEST_CASE("directional derivative matches the rational oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        int d = 1 + trial % 3, deg = 1 + trial % 4, r = 1 + trial % 3;
        auto ex = graded_monomials(d, deg);
        std::vector<int> idir(d);
        Point xi(d);
        for (int i = 0; i < d; ++i) {
            idir[i] = static_cast<int>(rng.index(5)) - 2;
            xi[i] = idir[i];
        }
        Vec poly(ex.size());
        oracle::Poly q;
        for (std::size_t m = 0; m < ex.size(); ++m) {
            int c = static_cast<int>(rng.index(9)) - 4;
            poly[m] = c;
            q[ex[m]] = c;
        }
        std::vector<oracle::Q> dq(idir.begin(), idir.end());
        for (int k = 0; k < r; ++k) q = oracle::directional_derivative(q, dq);
        Vec got = directional_power_derivative(ex, poly, xi, r);
        for (std::size_t m = 0; m < ex.size(); ++m) {
            double want = q.count(ex[m]) ? q[ex[m]].convert_to<double>() : 0.0;
            CHECK(got[m] == doctest::Approx(want));
        }
    }
}

TEST_CASE("basis examples") {
    SUBCASE("axes in the plane, r = 2") {
        auto B = build_basis(2, 2, DirectionSet::axes(2));
        CHECK(B.size() == 4);
        for (const Exponent& a : {Exponent{0, 0}, Exponent{1, 0}, Exponent{0, 1}, Exponent{1, 1}})
            CHECK(membership_residual(B, mono(B.exponents, a)) < 1e-12);
        CHECK(membership_residual(B, mono(B.exponents, {2, 0})) == doctest::Approx(1).epsilon(1e-12));
    }
    SUBCASE("axes plus diagonal kills the quadratics") {
        auto B = build_basis(2, 2, axes_plus_diagonal(2));
        CHECK(B.size() == 3);
        for (const Exponent& a : {Exponent{0, 0}, Exponent{1, 0}, Exponent{0, 1}})
            CHECK(membership_residual(B, mono(B.exponents, a)) < 1e-12);
        CHECK(membership_residual(B, mono(B.exponents, {1, 1})) == doctest::Approx(1).epsilon(1e-12));
    }
    SUBCASE("r = 1 gives constants") {
        Rng rng(2);
        for (int d = 1; d <= 4; ++d) {
            std::vector<Point> dirs;
            for (int k = 0; k < d + 2; ++k) dirs.push_back(rng.unit_vector(d));
            auto B = build_basis(d, 1, DirectionSet(dirs));
            CHECK(B.size() == 1);
            CHECK(B.n_monomials() == 1);
        }
    }
    SUBCASE("span-deficient directions are refused") {
        DirectionSet E({P({1, 0, 0}), P({0, 1, 0})});
        CHECK_THROWS_AS(build_basis(3, 2, E), PreconditionError);
    }
}

TEST_CASE("basis invariants") {
    Rng rng(5);
    for (int d = 1; d <= 3; ++d)
        for (int r = 1; r <= 3; ++r) {
            for (int variant = 0; variant < 3; ++variant) {
                DirectionSet E = DirectionSet::axes(d);
                if (variant == 1) E = axes_plus_diagonal(d);
                if (variant == 2) E = E.with(rng.unit_vector(d));
                auto B = build_basis(d, r, E);
                Mat G = B.coeffs * B.coeffs.transpose();
                CHECK((G - Mat::Identity(B.size(), B.size())).cwiseAbs().maxCoeff() < 1e-12);
                CHECK(annihilation_residual(B) <= 1e-9);
                CHECK(B.size() <= std::pow(r, d));
                for (const auto& a : B.exponents) CHECK(total_degree(a) <= d * (r - 1));
                if (variant == 0) CHECK(B.size() == static_cast<int>(std::pow(r, d)));
            }
        }
}

TEST_CASE("dimension with the diagonal matches the symbolic nullspace") {
    for (int d = 1; d <= 3; ++d)
        for (int r = 1; r <= 3; ++r) {
            std::vector<std::vector<int>> dirs;
            for (int i = 0; i < d; ++i) {
                std::vector<int> e(d, 0);
                e[i] = 1;
                dirs.push_back(e);
            }
            dirs.push_back(std::vector<int>(d, 1));
            CHECK(build_basis(d, r, axes_plus_diagonal(d)).size() == oracle::restricted_dimension(d, r, dirs));
        }
}

TEST_CASE("restriction to lines in E is a polynomial of degree < r") {
    Rng rng(9);
    for (int d = 2; d <= 3; ++d)
        for (int r = 1; r <= 3; ++r) {
            auto E = axes_plus_diagonal(d);
            auto B = build_basis(d, r, E);
            for (int trial = 0; trial < 100; ++trial) {
                Point x(d);
                for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1, 1);
                int k = static_cast<int>(rng.index(B.size()));
                Vec c = Vec::Unit(B.size(), k);
                const Point& xi = E.dirs[rng.index(E.size())];
                // 2r Chebyshev nodes, least-squares fit of degree r-1
                const int m = 2 * r;
                Mat V(m, r);
                Vec y(m);
                for (int j = 0; j < m; ++j) {
                    double t = std::cos(M_PI * (2 * j + 1) / (2.0 * m));
                    for (int q = 0; q < r; ++q) V(j, q) = std::pow(t, q);
                    y[j] = evaluate(B, c, x + t * xi);
                }
                Vec fit = V.colPivHouseholderQr().solve(y);
                CHECK((V * fit - y).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }
}

TEST_CASE("nested direction sets give nested spaces") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        int d = 2 + trial % 2, r = 2 + trial % 2;
        DirectionSet E = DirectionSet::axes(d);
        DirectionSet E2 = E.with(rng.unit_vector(d));
        auto B = build_basis(d, r, E);
        auto B2 = build_basis(d, r, E2);
        CHECK(B2.size() <= B.size());
        for (int i = 0; i < B2.size(); ++i) CHECK(membership_residual(B, B2.coeffs.row(i).transpose()) < 1e-9);
    }
}

TEST_CASE("basis dimension is affinely invariant") {
    Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        int d = 2 + trial % 2, r = 1 + trial % 3;
        DirectionSet E = trial % 3 == 0 ? DirectionSet::axes(d) : axes_plus_diagonal(d);
        Mat A = random_matrix(rng, d);
        CHECK(build_basis(d, r, E).size() == build_basis(d, r, mapped(E, A)).size());
        CHECK(build_basis(d, r, E).size() == build_basis(d, r, mapped(E, A.inverse())).size());
    }
}

TEST_CASE("evaluation") {
    auto B = build_basis(2, 3, DirectionSet::axes(2));
    Vec c = Vec::Unit(B.size(), 0);
    double c0 = evaluate(B, c, P({0.3, -0.7}));
    CHECK(evaluate(B, c, P({5, 2})) == doctest::Approx(c0).epsilon(1e-14));
    CHECK(evaluate(B, Vec::Zero(B.size()), P({0.1, 0.2})) == 0);
    CHECK_THROWS_AS(evaluate(B, Vec::Zero(B.size() + 1), P({0, 0})), DimensionError);
    CHECK_THROWS_AS(evaluate(B, c, P({0, 0, 0})), DimensionError);

    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        Vec cf(B.size());
        for (int i = 0; i < cf.size(); ++i) cf[i] = rng.normal();
        Point x = P({rng.uniform(-2, 2), rng.uniform(-2, 2)});
        // direct monomial oracle in long double
        long double want = 0;
        for (int k = 0; k < B.size(); ++k)
            for (int m = 0; m < B.n_monomials(); ++m) {
                long double t = static_cast<long double>(cf[k]) * B.coeffs(k, m);
                for (int i = 0; i < 2; ++i) t *= std::pow(static_cast<long double>(x[i]), B.exponents[m][i]);
                want += t;
            }
        double got = evaluate(B, cf, x);
        CHECK(std::abs(got - static_cast<double>(want)) <= 1e-12 * std::max(1.0, std::abs(static_cast<double>(want))));
    }
    std::vector<Point> pts = {P({0.1, 0.2}), P({-1, 3})};
    Mat V = basis_values(B, pts);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < B.size(); ++k) CHECK(V(i, k) == doctest::Approx(evaluate(B, Vec::Unit(B.size(), k), pts[i])));
}
