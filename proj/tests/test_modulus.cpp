#include <doctest.h>

#include "oracles.hpp"
#include "wlab/modulus.hpp"

#include <cmath>

using namespace wlab;

namespace {

Point P(std::initializer_list<double> xs) { return make_point(xs); }

Domain interval(double a, double b) { return Domain::box(P({a}), P({b})); }
Domain cube(int d, double lo, double hi) { return Domain::box(Point::Constant(d, lo), Point::Constant(d, hi)); }

SampledFunction power1d(int k) {
    return SampledFunction::callable(1, [k](const Point& x) { return std::pow(x[0], k); }, "x^k");
}

double theta_of(double p) { return std::min(p, 1.0); }

}  // namespace

TEST_CASE("finite differences") {
    auto x2 = power1d(2);
    CHECK(finite_difference(x2, P({0}), P({1}), 2) == doctest::Approx(2));
    auto lin = SampledFunction::callable(2, [](const Point& x) { return 3 * x[0] - 2 * x[1] + 1; });
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        Point x = P({rng.normal(), rng.normal()}), h = P({rng.normal(), rng.normal()});
        CHECK(std::abs(finite_difference(lin, x, h, 2)) < 1e-12 * (1 + x.norm() + h.norm()) * 10);
    }
    // r-th difference of x^r is r! h^r
    for (int r = 1; r <= 6; ++r) {
        double h = 0.5, fact = 1;
        for (int i = 2; i <= r; ++i) fact *= i;
        double direct = 0;
        for (int j = 0; j <= r; ++j) direct += ((r + j) % 2 ? -1.0 : 1.0) * oracle::binomial(r, j) * std::pow(j * h, r);
        double got = finite_difference(power1d(r), P({0}), P({h}), r);
        CHECK(got == doctest::Approx(fact * std::pow(h, r)).epsilon(1e-12));
        CHECK(got == doctest::Approx(direct).epsilon(1e-12));
    }
    CHECK(finite_difference(power1d(3), P({0}), P({0.5}), 3) == doctest::Approx(0.75));
}

TEST_CASE("finite differences compose") {
    Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        auto f = SampledFunction::random_poly(2, 5, 100 + trial);
        Point x = P({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        Point h = P({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
        for (int r = 2; r <= 4; ++r) {
            auto df = SampledFunction::callable(2, [&](const Point& y) { return f(y + h) - f(y); });
            double a = finite_difference(f, x, h, r);
            double b = finite_difference(df, x, h, r - 1);
            double scale = 0;
            for (int j = 0; j <= r; ++j) scale += oracle::binomial(r, j) * std::abs(f(x + j * h));
            CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("ridge log convention") {
    auto f = SampledFunction::ridge_log(5, P({0, 2}));
    CHECK(f(P({0.3, 0.5})) == doctest::Approx(std::log(0.5)));
    CHECK(f(P({0.3, 0})) == -5);
    CHECK(f(P({0.3, -1})) == -5);
    CHECK(f(P({0, std::exp(-5.0)})) == -5);
    CHECK(f(P({0, std::exp(-4.9)})) == doctest::Approx(-4.9));
    CHECK(f(P({0, 1e-9})) == -5);
}

TEST_CASE("shift domains") {
    Domain I = interval(0, 1);
    SamplePlan g = grid_plan(I, 101);
    auto idx = shift_domain(I, g, P({0.6}), 1);
    REQUIRE(!idx.empty());
    for (int i : idx) CHECK(g.points[i][0] <= 0.4 + 1e-12);
    CHECK(idx.size() == 41);
    CHECK(shift_domain(I, g, P({0.6}), 2).empty());

    Domain disk = Domain::ball(P({0, 0}), 1);
    SamplePlan plan = make_plan(disk, 20000, 3);
    auto lens = shift_domain(disk, plan, P({0.5, 0}), 2);
    std::vector<int> want;
    for (std::size_t i = 0; i < plan.points.size(); ++i) {
        const Point& x = plan.points[i];
        if ((x + P({1, 0})).norm() <= 1) want.push_back(static_cast<int>(i));
    }
    CHECK(lens == want);
    // area of the lens against a 10^6-point rejection estimate
    Rng rng(4);
    long hit = 0;
    const long N = 1000000;
    for (long k = 0; k < N; ++k) {
        Point x = P({rng.uniform(-1, 1), rng.uniform(-1, 1)});
        if (x.norm() <= 1 && (x + P({1, 0})).norm() <= 1) ++hit;
    }
    double mc = 4.0 * hit / N;
    double plan_area = 0;
    for (int i : lens) plan_area += plan.weights[i];
    CHECK(mc == doctest::Approx(2 * M_PI / 3 - std::sqrt(3.0) / 2).epsilon(0.01));
    CHECK(plan_area == doctest::Approx(mc).epsilon(0.05));
}

TEST_CASE("lp norms") {
    for (double p : {0.3, 1.0, 2.0, kInf}) CHECK(lp_norm({3}, {1}, p) == doctest::Approx(3));
    CHECK(lp_norm({1, 1}, {1, 1}, 1) == doctest::Approx(2));
    CHECK(lp_norm({1, 1}, {1, 1}, kInf) == 1);
    CHECK(lp_norm({1, 2, 3}, {1, 1, 1}, 0.5) == doctest::Approx(std::pow(1 + std::sqrt(2.0) + std::sqrt(3.0), 2)));
    CHECK(lp_norm({1, 2, 3}, {1, 1, 1}, 0.5) == doctest::Approx(17.19).epsilon(1e-3));
    bool empty = false;
    CHECK(lp_norm({}, {}, 2, &empty) == 0);
    CHECK(empty);
    CHECK_THROWS_AS(lp_norm({1}, {1, 2}, 1), DimensionError);
    // tiny and huge values survive the max scaling
    CHECK(lp_norm({1e-200, 1e-200}, {1, 1}, 2) == doctest::Approx(std::sqrt(2.0) * 1e-200));
    CHECK(lp_norm({1e200, 1e200}, {1, 1}, 2) == doctest::Approx(std::sqrt(2.0) * 1e200));
}

TEST_CASE("directional modulus examples") {
    Domain I = interval(0, 1);
    SamplePlan g = grid_plan(I, 1001);
    auto x = power1d(1);
    auto m = directional_modulus(x, I, g, P({1}), 1, 1, kInf);
    CHECK(m.value == doctest::Approx(1));
    auto m2 = directional_modulus(power1d(2), I, g, P({1}), 1, 1, kInf);
    // brute force over (x, u)
    double brute = 0;
    for (int i = 0; i <= 1000; ++i)
        for (int k = 1; k <= 1000; ++k) {
            double xx = i / 1000.0, u = k / 1000.0;
            if (xx + u <= 1) brute = std::max(brute, std::abs((xx + u) * (xx + u) - xx * xx));
        }
    CHECK(brute == doctest::Approx(1));
    CHECK(m2.value == doctest::Approx(brute));
    CHECK(m2.u == doctest::Approx(1));
    CHECK(m2.n_valid_points == 1);
    CHECK_FALSE(m2.reliable);

    auto far = directional_modulus(x, I, grid_plan(I, 5), P({1}), 1, 0.01, 2);
    CHECK(far.n_valid_points > 0);
    auto none = directional_modulus(x, interval(0, 1), SamplePlan{1, {P({1.0})}, {1.0}}, P({1}), 1, 0.5, 2);
    CHECK(none.empty);
    CHECK(none.value == 0);
}

TEST_CASE("modulus annihilates the restricted space") {
    Domain Q = cube(2, 0, 1);
    SamplePlan plan = make_plan(Q, 800, 7);
    Rng rng(8);
    for (int r = 1; r <= 3; ++r) {
        DirectionSet E = DirectionSet::axes(2).with(P({std::sqrt(0.5), std::sqrt(0.5)}));
        auto B = build_basis(2, r, E);
        for (int trial = 0; trial < 5; ++trial) {
            Vec c(B.size());
            for (int i = 0; i < c.size(); ++i) c[i] = rng.normal();
            auto f = SampledFunction::polynomial(B.exponents, to_monomial(B, c));
            for (double p : {0.5, 1.0, 2.0, kInf}) {
                ModulusOptions o;
                o.n_shift = 8;
                auto m = set_modulus(f, Q, plan, E, r, std::sqrt(2.0), p, o);
                CHECK(m.value <= 1e-9 * std::max(1.0, sup_on_plan(f, plan)));
            }
        }
    }
}

TEST_CASE("modulus properties") {
    Domain Q = cube(2, 0, 1);
    SamplePlan plan = make_plan(Q, 500, 9);
    DirectionSet E = DirectionSet::axes(2);
    ModulusOptions o;
    o.n_shift = 16;
    Rng rng(10);
    for (int trial = 0; trial < 12; ++trial) {
        int r = 1 + trial % 3;
        double p = std::vector<double>{0.5, 1, 2, kInf}[trial % 4];
        auto f = SampledFunction::random_poly(2, 4, 200 + trial);
        auto g = SampledFunction::random_poly(2, 3, 300 + trial);
        double c = rng.uniform(-3, 3);
        double wf = set_modulus(f, Q, plan, E, r, 0.7, p, o).value;
        double wcf = set_modulus(f.scaled(c), Q, plan, E, r, 0.7, p, o).value;
        CHECK(wcf == doctest::Approx(std::abs(c) * wf).epsilon(1e-12));

        // E monotone
        DirectionSet E2 = E.with(rng.unit_vector(2));
        CHECK(set_modulus(f, Q, plan, E2, r, 0.7, p, o).value >= wf);
        CHECK(set_modulus(f, Q, plan, E.symmetrized(), r, 0.7, p, o).value >= wf);

        // t monotone on nested grids
        ModulusOptions nested;
        nested.grid_step = 0.05;
        nested.refine = false;
        double a = set_modulus(f, Q, plan, E, r, 0.3, p, nested).value;
        double b = set_modulus(f, Q, plan, E, r, 0.6, p, nested).value;
        CHECK(a <= b);

        // subadditivity at level theta
        double th = theta_of(p);
        double wg = set_modulus(g, Q, plan, E, r, 0.7, p, o).value;
        double wfg = set_modulus(f.plus(g), Q, plan, E, r, 0.7, p, o).value;
        CHECK(std::pow(wfg, th) <= std::pow(wf, th) + std::pow(wg, th) + 1e-12);

        // one direction reduces to the directional modulus
        auto d0 = directional_modulus(f, Q, plan, E.dirs[0], r, 0.7, p, o);
        auto s0 = set_modulus(f, Q, plan, DirectionSet({E.dirs[0]}), r, 0.7, p, o);
        CHECK(d0.value == s0.value);
    }
}

TEST_CASE("set modulus ties go to the first direction") {
    Domain Q = cube(2, 0, 1);
    SamplePlan plan = grid_plan(Q, 11);
    auto f = SampledFunction::callable(2, [](const Point& x) { return x[0] + x[1]; });
    auto m = set_modulus(f, Q, plan, DirectionSet::axes(2), 1, 1, kInf);
    CHECK(m.xi_index == 0);
    CHECK(m.value == doctest::Approx(1));
}

TEST_CASE("lattice form of the one-step chain inequality") {
    Rng rng(12);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int r = 1 + static_cast<int>(rng.index(3));
        double p = std::vector<double>{0.5, 1, 2, kInf}[rng.index(4)];
        int h = 1 + static_cast<int>(rng.index(2));
        // K is an interval of the lattice, J the points reachable from K by r steps back
        int k0 = static_cast<int>(rng.index(5)), k1 = k0 + r * h + static_cast<int>(rng.index(6));
        std::vector<int> K, J;
        for (int i = k0; i <= k1; ++i) K.push_back(i);
        for (int x = k1 + 1; x <= k1 + 8; ++x) {
            bool ok = true;
            for (int j = 1; j <= r; ++j) ok = ok && (x - j * h >= k0 && x - j * h <= k1);
            if (ok && rng.uniform() < 0.8) J.push_back(x);
        }
        if (J.empty()) continue;
        std::vector<Point> pts;
        std::vector<double> vals;
        for (int i = k0; i <= k1 + 8; ++i) {
            pts.push_back(P({double(i)}));
            vals.push_back(rng.normal() * 3);
        }
        auto F = SampledFunction::table(pts, vals);
        std::vector<double> vKJ, vK, vD;
        for (int i : K) vK.push_back(F(P({double(i)})));
        vKJ = vK;
        for (int x : J) {
            vKJ.push_back(F(P({double(x)})));
            vD.push_back(finite_difference(F, P({double(x - r * h)}), P({double(h)}), r));
        }
        auto ones = [](std::size_t n) { return std::vector<double>(n, 1.0); };
        double th = theta_of(p);
        double lhs = std::pow(lp_norm(vKJ, ones(vKJ.size()), p), th);
        double rhs = std::pow(lp_norm(vD, ones(vD.size()), p), th) + std::pow(2.0, r) * std::pow(lp_norm(vK, ones(vK.size()), p), th);
        CHECK(lhs <= rhs + 1e-12);
        ++checked;
    }
    CHECK(checked > 300);
}

TEST_CASE("table lookups") {
    auto T = SampledFunction::table({P({0, 0}), P({1, 0.5})}, {2, 3});
    CHECK(T(P({1, 0.5})) == 3);
    CHECK_THROWS_AS(T(P({0.5, 0.5})), PreconditionError);
    CHECK_THROWS_AS(SampledFunction::table({P({0})}, {}), InputError);
}
