#include <doctest.h>

#include "wlab/whitney.hpp"

#include <cmath>

using namespace wlab;

namespace {

Point P(std::initializer_list<double> xs) { return make_point(xs); }

Domain unit_interval() { return Domain::box(P({0}), P({1})); }
Domain unit_square() { return Domain::box(P({0, 0}), P({1, 1})); }

const double kCeiling = 2 + std::exp(-2.0);

DirectionSet eighty_degrees() {
    double a = 80 * M_PI / 180;
    return DirectionSet({P({1, 0}), P({std::cos(a), std::sin(a)})});
}

AffineMap random_affine(Rng& rng, int d, double max_cond) {
    for (;;) {
        Mat M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = rng.normal();
        Eigen::JacobiSVD<Mat> svd(M);
        auto s = svd.singularValues();
        if (s[d - 1] > 1e-3 && s[0] / s[d - 1] <= max_cond) {
            Point b(d);
            for (int i = 0; i < d; ++i) b[i] = rng.normal();
            return AffineMap::make(M, b);
        }
    }
}

}  // namespace

TEST_CASE("whitney ratio examples") {
    Domain I = unit_interval();
    SamplePlan plan = grid_plan(I, 2001);
    auto E = DirectionSet::axes(1);
    auto B1 = build_basis(1, 1, E);

    auto x = SampledFunction::polynomial({{0}, {1}}, (Vec(2) << 0, 1).finished());
    RatioResult rr = whitney_ratio(x, I, plan, E, B1, 1, kInf);
    REQUIRE(rr.defined);
    CHECK(rr.error == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rr.modulus == doctest::Approx(1).epsilon(1e-9));
    CHECK(rr.ratio == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(rr.t == doctest::Approx(1));

    // members of the restricted space give 0/0
    auto B2 = build_basis(1, 2, E);
    auto lin = SampledFunction::polynomial({{0}, {1}}, (Vec(2) << 3, -2).finished());
    CHECK_FALSE(whitney_ratio(lin, I, plan, E, B2, 2, kInf).defined);
    CHECK_FALSE(whitney_ratio(SampledFunction::polynomial({{0}}, Vec::Constant(1, 0.0)), I, plan, E, B1, 1, 2).defined);
    CHECK_THROWS_AS(whitney_ratio(x, I, plan, E, B2, 1, kInf), PreconditionError);
}

TEST_CASE("random polynomials on [0,1] stay under the 1-D ceiling") {
    Domain I = unit_interval();
    SamplePlan plan = grid_plan(I, 801);
    auto E = DirectionSet::axes(1);
    for (int r = 1; r <= 4; ++r) {
        FamilySpec fam;
        fam.size = 40;
        fam.degree = r + 3;
        fam.seed = 100 + r;
        auto est = empirical_whitney_constant(I, plan, E, r, kInf, fam);
        INFO("r=" << r << " lower=" << est.lower_bound);
        CHECK(est.n_defined == 40);
        CHECK(est.lower_bound > 0);
        CHECK(est.lower_bound <= kCeiling);
        CHECK(est.witness >= 0);
        CHECK(*est.ratios[est.witness] == est.lower_bound);
    }
}

TEST_CASE("empirical constant") {
    Domain Q = unit_square();
    SamplePlan plan = grid_plan(Q, 25);
    auto E = DirectionSet::axes(2);
    SUBCASE("family inside the restricted space") {
        FamilySpec fam;
        fam.kind = FamilyKind::perturbed_basis;
        fam.perturbation = 0;
        fam.size = 5;
        CHECK_THROWS_AS(empirical_whitney_constant(Q, plan, E, 2, kInf, fam), PreconditionError);
    }
    SUBCASE("two seeds agree") {
        double v[2];
        for (int s = 0; s < 2; ++s) {
            FamilySpec fam;
            fam.size = 60;
            fam.seed = 7 + 1000 * s;
            auto est = empirical_whitney_constant(Q, plan, E, 2, kInf, fam);
            v[s] = est.lower_bound;
            // reproducible
            CHECK(empirical_whitney_constant(Q, plan, E, 2, kInf, fam).lower_bound == est.lower_bound);
        }
        INFO(v[0] << " " << v[1]);
        CHECK(std::abs(v[0] - v[1]) <= 0.1 * std::max(v[0], v[1]));
    }
    SUBCASE("budget and perturbed basis") {
        FamilySpec fam;
        fam.kind = FamilyKind::perturbed_basis;
        fam.size = 10;
        auto est = empirical_whitney_constant(Q, plan, E, 2, 2, fam, 4);
        CHECK(est.n_tried == 4);
        CHECK(est.n_defined == 4);
    }
}

TEST_CASE("ridge logarithms on the cone body") {
    Domain K = counterexample_body(2, P({0, 1}), 0.01);
    SamplePlan plan = make_plan(K, 4096, 3);
    for (int j = 0; j <= 2; ++j) plan.add_point(P({0, j / 2.0}), plan.weights[0]);
    FamilySpec fam;
    fam.kind = FamilyKind::ridge_log;
    fam.xi = P({0, 1});
    fam.ns = {1, 2, 4, 8, 16, 32, 64};
    auto est = empirical_whitney_constant(K, plan, eighty_degrees(), 1, kInf, fam);
    REQUIRE(est.n_defined == 7);
    // growth at least linear in n past the start
    for (std::size_t i = 3; i < fam.ns.size(); ++i) {
        double ratio = *est.ratios[i];
        CHECK(ratio >= 0.1 * fam.ns[i]);
        CHECK(ratio > *est.ratios[i - 1]);
    }
    CHECK(est.witness == 6);
}

TEST_CASE("chain upper bound") {
    auto a = chain_upper_bound(1, 1, 1.0, 1.0);
    CHECK(a.recursion == 3);
    CHECK(a.closed_form == 3);
    auto b = chain_upper_bound(2, 2, 0.0, kInf);
    CHECK(b.theta == 1);
    CHECK(b.recursion == 5);
    CHECK(b.closed_form == 5);
    // direct recursion at theta = 1/2
    {
        auto c = chain_upper_bound(3, 1, 2.0, 0.5);
        double w = std::sqrt(2.0);
        for (int k = 0; k < 3; ++k) w = 1 + 2 * w;
        CHECK(c.recursion == doctest::Approx(w * w).epsilon(1e-14));
        CHECK(std::abs(c.recursion - c.closed_form) <= 1e-12 * c.recursion);
    }
    for (int m = 0; m <= 10; ++m)
        for (int r = 1; r <= 4; ++r)
            for (double p : {1.0, 0.5, 1.0 / 3})
                for (double w0 : {0.0, 1.0, 2.0}) {
                    auto cb = chain_upper_bound(m, r, w0, p);
                    INFO(m << " " << r << " " << p << " " << w0);
                    CHECK(std::abs(cb.recursion - cb.closed_form) <= 1e-12 * cb.closed_form);
                    CHECK(cb.recursion >= w0 - 1e-12);
                }
    CHECK(chain_upper_bound(0, 3, 4.0, kInf).recursion == 4);
    auto huge = chain_upper_bound(2500, 2, 1.0, 1.0);
    CHECK(huge.overflow);
    CHECK(std::isinf(huge.recursion));
    CHECK_THROWS_AS(chain_upper_bound(1, 1, -1.0, 1.0), PreconditionError);

    // verified chains only
    DecompositionChain ch;
    ch.r = 1;
    ch.dirset = DirectionSet::axes(2);
    ch.pieces.push_back(unit_square());
    ch.hints.push_back({});
    ch.add(Domain::box(P({1, 0}), P({2, 1})), P({1, 0}));
    auto vc = verified(ch);
    REQUIRE(vc.report.ok);
    auto cb = chain_upper_bound(vc, 1.0, 1.0);
    CHECK(cb.recursion == 3);
    CHECK(!cb.w0_assumption.empty());
    ch.shifts[0] = P({0.5, 0});
    ch.r = 2;
    CHECK_THROWS_AS(chain_upper_bound(verified(ch), 1.0, 1.0), PreconditionError);
}

TEST_CASE("length factor") {
    CHECK(length_factor(1, 2).exponent == 1);
    CHECK(length_factor(3, kInf).exponent == 2);
    CHECK(length_factor(2, 0.5).exponent == 5);
    CHECK(length_factor(2, 1).times_length(2) == doctest::Approx(8));
    CHECK(length_factor(2, 1).text.find("unknown") != std::string::npos);
}

TEST_CASE("counterexample body") {
    Domain K = counterexample_body(2, P({0, 1}), 0.1);
    CHECK(K.kind() == DomainKind::cone_body);
    CHECK(K.contains(P({0, 0.5})));
    CHECK_FALSE(K.contains(P({0, 2})));
    CHECK_FALSE(K.contains(P({1, 0.5})));
    CHECK_THROWS_AS(counterexample_body(2, P({0, 1}), 0.0), PreconditionError);
    CHECK_THROWS_AS(counterexample_body(2, P({0, 1}), 1.0), PreconditionError);
    CHECK_THROWS_AS(counterexample_body(3, P({0, 1}), 0.5), DimensionError);
}

TEST_CASE("counterexample certificate") {
    CHECK(divergence_floor(100, 2, 1) == doctest::Approx((100 - 4 * std::log(2.0)) / 4).epsilon(1e-15));
    CHECK(divergence_floor(100, 2, 1) == doctest::Approx(24.3069).epsilon(1e-5));

    CertificateOptions opt;
    opt.density = 2048;
    auto cert = counterexample_certificate(2, P({0, 1}), 0.01, eighty_degrees(), 1, {1, 4, 16, 64}, opt);
    CHECK(cert.margin == doctest::Approx(1 - std::sin(80 * M_PI / 180)).epsilon(1e-12));
    CHECK(cert.margin > 0.01);
    REQUIRE(cert.rows.size() == 4);
    for (std::size_t i = 0; i < cert.rows.size(); ++i) {
        const auto& row = cert.rows[i];
        CHECK(row.floor == doctest::Approx(divergence_floor(row.n, 2, 1)));
        CHECK(row.growth_certified);
        CHECK(row.numeric_er >= row.floor - 1e-6);
        if (i) CHECK(row.floor > cert.rows[i - 1].floor);
    }
    // the modulus column levels off once the truncation at -n leaves the body
    CHECK(cert.rows[3].modulus == doctest::Approx(cert.rows[2].modulus).epsilon(1e-9));

    // eta.xi too close to 1
    DirectionSet bad({P({1, 0}), P({std::cos(1.55), std::sin(1.55)})});
    CHECK_THROWS_AS(counterexample_certificate(2, P({0, 1}), 0.01, bad, 1, {1}, opt), PreconditionError);
}

TEST_CASE("ratio invariance under f -> c f + Q") {
    Domain Q = unit_square();
    SamplePlan plan = grid_plan(Q, 21);
    auto E = DirectionSet::axes(2);
    const int r = 2;
    auto basis = build_basis(2, r, E);
    Rng rng(77);
    for (double p : {1.0, 2.0, kInf}) {
        for (int k = 0; k < 6; ++k) {
            auto f = SampledFunction::random_poly(2, 4, Rng::derive(10, k));
            Vec c(basis.size());
            for (int i = 0; i < c.size(); ++i) c[i] = rng.normal();
            auto q = SampledFunction::polynomial(basis.exponents, to_monomial(basis, c));
            double s = rng.uniform(-3, 3);
            if (std::abs(s) < 0.2) s = 1.7;
            auto g = f.scaled(s).plus(q);
            auto a = whitney_ratio(f, Q, plan, E, basis, r, p);
            auto b = whitney_ratio(g, Q, plan, E, basis, r, p);
            REQUIRE(a.defined);
            REQUIRE(b.defined);
            INFO("p=" << p << " k=" << k);
            CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-6));
        }
    }
}

TEST_CASE("affine invariance of the ratio") {
    Domain Q = unit_square();
    SamplePlan plan = grid_plan(Q, 21);
    WhitneyOptions opt;
    auto E = DirectionSet({P({1, 0}), P({0.6, 0.8})});
    const int r = 2;
    auto basis = build_basis(2, r, E);
    Rng rng(5);
    int checked = 0;
    for (double p : {1.0, kInf}) {
        for (int k = 0; k < 5; ++k) {
            AffineMap T = random_affine(rng, 2, 10);
            std::vector<Point> dirs;
            for (const auto& xi : E.dirs) dirs.push_back((T.M * xi).normalized());
            DirectionSet ET(dirs);
            auto basisT = build_basis(2, r, ET);
            Domain TQ = image(Q, T);
            SamplePlan tplan = transform_plan(plan, T);
            auto f = SampledFunction::random_poly(2, 4, Rng::derive(40, k));
            auto fT = SampledFunction::composition(f, T.inverse_map());
            auto a = whitney_ratio(f, Q, plan, E, basis, r, p, opt);
            auto b = whitney_ratio(fT, TQ, tplan, ET, basisT, r, p, opt);
            REQUIRE(a.defined);
            REQUIRE(b.defined);
            INFO("p=" << p << " k=" << k << " " << a.ratio << " " << b.ratio);
            CHECK(std::abs(a.ratio - b.ratio) <= 0.05 * a.ratio);
            ++checked;
        }
    }
    CHECK(checked == 10);
}
