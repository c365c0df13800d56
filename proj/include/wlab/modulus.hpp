#pragma once

#include "wlab/geometry.hpp"
#include "wlab/polyspace.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace wlab {

enum class FunctionKind { polynomial, ridge_log, random_poly, table, callable, combination, composition };
const char* to_string(FunctionKind k);

// A function R^d -> R that can be evaluated anywhere it is defined.
class SampledFunction {
public:
    SampledFunction() = default;

    static SampledFunction polynomial(std::vector<Exponent> exponents, Vec coeffs);
    // max{-n, ln(x.xi)}, with -n wherever x.xi <= e^{-n}
    static SampledFunction ridge_log(int n, Point xi);
    // standard normal coefficients on all monomials of degree <= degree
    static SampledFunction random_poly(int d, int degree, std::uint64_t seed);
    // exact lookup; evaluating off the table throws
    static SampledFunction table(std::vector<Point> points, std::vector<double> values);
    static SampledFunction callable(int d, std::function<double(const Point&)> fn, std::string label = "callable");
    // sum_i c_i f_i
    static SampledFunction combination(std::vector<double> weights, std::vector<SampledFunction> terms);
    // x -> f(map(x))
    static SampledFunction composition(SampledFunction f, AffineMap map);

    SampledFunction scaled(double c) const { return combination({c}, {*this}); }
    SampledFunction plus(const SampledFunction& g, double c = 1.0) const { return combination({1.0, c}, {*this, g}); }

    double operator()(const Point& x) const;
    int dim() const;
    FunctionKind kind() const;
    bool valid() const { return node_ != nullptr; }
    std::string describe() const;

    // Fields, for serialization.
    const std::vector<Exponent>& exponents() const;
    const Vec& coeffs() const;
    int ridge_n() const;
    const Point& ridge_xi() const;
    int degree() const;
    std::uint64_t seed() const;
    const std::vector<Point>& table_points() const;
    const std::vector<double>& table_values() const;
    const std::vector<double>& weights() const;
    const std::vector<SampledFunction>& terms() const;
    const AffineMap& map() const;

    struct Node;

private:
    std::shared_ptr<const Node> node_;
};

// sum_{j=0}^r (-1)^{r+j} C(r,j) f(x+jh)
double finite_difference(const SampledFunction& f, const Point& x, const Point& h, int r);
double binomial(int n, int k);

// Plan indices i with plan.points[i] + j h in dom for j = 1..r.
std::vector<int> shift_domain(const Domain& dom, const SamplePlan& plan, const Point& h, int r);

// (sum w_i |v_i|^p)^(1/p), max |v_i| for p = inf. Empty input gives 0 and sets *empty.
double lp_norm(const std::vector<double>& values, const std::vector<double>& weights, double p, bool* empty = nullptr);

struct ModulusOptions {
    int n_shift = 64;
    // when > 0 the shifts are k * grid_step <= t instead of t k / n_shift, so grids for
    // different t are nested
    double grid_step = 0;
    bool refine = true;  // golden-section polish of the top shifts at p = inf
    // on convex domains the t k / n_shift grid stops at the longest forward chord / r, past
    // which every shift set is empty; this keeps the grid covariant under affine maps
    bool cap_to_reach = true;
    int min_points = 8;
};

struct ModulusResult {
    double value = 0;
    double u = 0;  // argmax step length
    Point xi;      // argmax direction
    int xi_index = -1;
    int n_valid_points = 0;  // size of the sampled shift set at the argmax
    bool reliable = false;   // n_valid_points >= min_points
    bool empty = false;      // every shift set was empty
};

ModulusResult directional_modulus(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const Point& xi,
                                  int r, double t, double p, const ModulusOptions& opt = {});

ModulusResult set_modulus(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const DirectionSet& E, int r,
                          double t, double p, const ModulusOptions& opt = {});

// max |f| over the plan points
double sup_on_plan(const SampledFunction& f, const SamplePlan& plan);

}  // namespace wlab
