#include <doctest.h>

#include "wlab/approx.hpp"

#include <cmath>

using namespace wlab;

namespace {

Point P(std::initializer_list<double> xs) { return make_point(xs); }

Domain interval(double a, double b) { return Domain::box(P({a}), P({b})); }
Domain cube(int d, double lo, double hi) { return Domain::box(Point::Constant(d, lo), Point::Constant(d, hi)); }

std::vector<double> residuals(const SampledFunction& f, const PolySpaceBasis& B, const SamplePlan& plan, const Vec& c) {
    std::vector<double> r;
    for (const auto& x : plan.points) r.push_back(f(x) - evaluate(B, c, x));
    return r;
}

const double kPs[] = {0.5, 1.0, 2.0, kInf};

}  // namespace

TEST_CASE("approximation examples") {
    SUBCASE("functions in the space are reproduced") {
        Domain Q = cube(2, 0, 1);
        SamplePlan plan = make_plan(Q, 400, 1);
        auto B = build_basis(2, 2, DirectionSet::axes(2));
        Vec c(4);
        c << 0.3, -1.2, 2.0, 0.7;
        auto f = SampledFunction::polynomial(B.exponents, to_monomial(B, c));
        for (double p : kPs) {
            auto res = best_approx(f, Q, plan, B, p);
            CHECK(res.error <= 1e-9);
            CHECK((res.coeffs - c).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
    SUBCASE("x^2 by lines on [0,1] in the uniform norm") {
        Domain I = interval(0, 1);
        SamplePlan plan = grid_plan(I, 10001);
        auto B = build_basis(1, 2, DirectionSet::axes(1));
        auto f = SampledFunction::callable(1, [](const Point& x) { return x[0] * x[0]; });
        auto res = best_approx(f, I, plan, B, kInf);
        CHECK(res.status == ApproxStatus::optimal);
        CHECK(res.error == doctest::Approx(0.125).epsilon(1e-9));
        // Q = x - 1/8
        CHECK(evaluate(B, res.coeffs, P({0})) == doctest::Approx(-0.125).epsilon(1e-9));
        CHECK(evaluate(B, res.coeffs, P({1})) == doctest::Approx(0.875).epsilon(1e-9));
        CHECK(res.duality_gap <= 1e-9);
    }
    SUBCASE("x by constants on [-1,1] in L2") {
        Domain I = interval(-1, 1);
        SamplePlan plan = grid_plan(I, 20001);
        double h = 2.0 / 20000;
        for (std::size_t i = 0; i < plan.size(); ++i) plan.weights[i] = (i == 0 || i + 1 == plan.size()) ? h / 2 : h;
        auto B = build_basis(1, 1, DirectionSet::axes(1));
        auto f = SampledFunction::callable(1, [](const Point& x) { return x[0]; });
        auto res = best_approx(f, I, plan, B, 2);
        CHECK(res.error == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-6));
        CHECK(std::abs(res.coeffs[0]) < 1e-12);
    }
    SUBCASE("too few points") {
        auto B = build_basis(2, 2, DirectionSet::axes(2));
        SamplePlan plan;
        plan.dim = 2;
        plan.add_point(P({0, 0}), 1);
        plan.add_point(P({1, 0}), 1);
        plan.add_point(P({0, 1}), 1);
        auto f = SampledFunction::random_poly(2, 3, 1);
        CHECK_THROWS_AS(best_approx(f, cube(2, 0, 1), plan, B, 2), PreconditionError);
    }
}

TEST_CASE("univariate approximation") {
    std::vector<Sample1d> s;
    for (int i = 0; i <= 200; ++i) {
        double t = -1 + i / 100.0;
        s.push_back({t, 2 - 3 * t + 0.5 * t * t, 1.0});
    }
    for (double p : kPs) CHECK(best_approx_1d(s, 3, p).error <= 1e-9);
    auto c = best_approx_1d(s, 3, 2).coeffs;
    CHECK(c[0] == doctest::Approx(2));
    CHECK(c[1] == doctest::Approx(-3));
    CHECK(c[2] == doctest::Approx(0.5));

    std::vector<Sample1d> a;
    for (int i = 0; i <= 200; ++i) {
        double t = -1 + i / 100.0;
        a.push_back({t, std::abs(t), 1.0});
    }
    auto m = best_approx_1d(a, 1, kInf);
    CHECK(m.error == doctest::Approx(0.5));
    CHECK(m.coeffs[0] == doctest::Approx(0.5));

    std::vector<Sample1d> q;
    for (int i = 0; i <= 1000; ++i) {
        double t = i / 1000.0;
        q.push_back({t, t * t, 1.0});
    }
    CHECK(best_approx_1d(q, 2, kInf).error == doctest::Approx(0.125).epsilon(1e-9));
    CHECK_THROWS_AS(best_approx_1d({{0, 1, 1}, {0, 2, 1}}, 2, 2), PreconditionError);
}

TEST_CASE("optimality certificates") {
    Domain Q = cube(2, -1, 1);
    SamplePlan plan = make_plan(Q, 600, 3);
    auto B = build_basis(2, 2, DirectionSet::axes(2).with(P({std::sqrt(0.5), std::sqrt(0.5)})));
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = SampledFunction::random_poly(2, 4, 40 + trial);
        // p = 2: residual orthogonal to the basis
        auto r2 = best_approx(f, Q, plan, B, 2);
        auto res = residuals(f, B, plan, r2.coeffs);
        double rn = 0;
        for (std::size_t i = 0; i < res.size(); ++i) rn += plan.weights[i] * res[i] * res[i];
        rn = std::sqrt(rn);
        for (int k = 0; k < B.size(); ++k) {
            double ip = 0, pn = 0;
            for (std::size_t i = 0; i < res.size(); ++i) {
                double pk = evaluate(B, Vec::Unit(B.size(), k), plan.points[i]);
                ip += plan.weights[i] * res[i] * pk;
                pn += plan.weights[i] * pk * pk;
            }
            CHECK(std::abs(ip) <= 1e-9 * rn * std::sqrt(pn));
        }
        // p = inf: LP duality gap
        auto ri = best_approx(f, Q, plan, B, kInf);
        CHECK(ri.duality_gap <= 1e-9 * std::max(1.0, ri.error));
        auto resi = residuals(f, B, plan, ri.coeffs);
        int attain = 0;
        for (double v : resi) attain += std::abs(v) >= (1 - 1e-6) * ri.error;
        CHECK(attain >= B.size() + 1);
        // error is consistent with the coefficients
        for (double p : kPs) {
            auto rp = best_approx(f, Q, plan, B, p);
            double again = lp_norm(residuals(f, B, plan, rp.coeffs), plan.weights, p);
            CHECK(rp.error == doctest::Approx(again).epsilon(1e-10));
        }
    }
}

TEST_CASE("equioscillation in one variable") {
    Domain I = interval(0, 1);
    SamplePlan plan = grid_plan(I, 2001);
    for (int r = 1; r <= 4; ++r) {
        auto B = build_basis(1, r, DirectionSet::axes(1));
        auto f = SampledFunction::callable(1, [](const Point& x) { return std::exp(2 * x[0]) * std::sin(5 * x[0]); });
        auto res = best_approx(f, I, plan, B, kInf);
        auto rs = residuals(f, B, plan, res.coeffs);
        // alternation points in order
        int alternations = 0, last = 0;
        for (double v : rs) {
            if (std::abs(v) < (1 - 1e-6) * res.error) continue;
            int s = v > 0 ? 1 : -1;
            if (s != last) {
                ++alternations;
                last = s;
            }
        }
        CHECK(alternations >= B.size() + 1);
    }
}

TEST_CASE("approximation properties") {
    Domain Q = cube(2, 0, 1);
    SamplePlan plan = make_plan(Q, 300, 6);
    auto E = DirectionSet::axes(2);
    auto E2 = E.with(P({std::sqrt(0.5), std::sqrt(0.5)}));
    auto B = build_basis(2, 2, E);
    auto B2 = build_basis(2, 2, E2);
    Rng rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        auto f = SampledFunction::random_poly(2, 4, 70 + trial);
        for (double p : kPs) {
            auto res = best_approx(f, Q, plan, B, p);
            // random probes never beat the solver (except possibly at p < 1)
            for (int k = 0; k < 100; ++k) {
                Vec c = res.coeffs;
                for (int j = 0; j < c.size(); ++j) c[j] += rng.normal() * 0.05;
                double probe = lp_norm(residuals(f, B, plan, c), plan.weights, p);
                if (p >= 1) CHECK(res.error <= probe * (1 + 1e-9));
                else CHECK(res.error <= probe * (1 + 1e-6));
            }
            // homogeneity
            double c = rng.uniform(0.2, 5) * (trial % 2 ? -1 : 1);
            auto rc = best_approx(f.scaled(c), Q, plan, B, p);
            double tol = p >= 1 ? 1e-7 : 1e-3;
            CHECK(rc.error == doctest::Approx(std::abs(c) * res.error).epsilon(tol));
            // a smaller space cannot approximate better
            auto res2 = best_approx(f, Q, plan, B2, p);
            if (p == 2 || std::isinf(p)) CHECK(res.error <= res2.error + 1e-10);
            else CHECK(res.error <= res2.error * (1 + 1e-6) + 1e-10);
        }
    }
}
