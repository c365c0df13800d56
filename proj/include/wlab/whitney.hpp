#pragma once

#include "wlab/approx.hpp"
#include "wlab/decompose.hpp"
#include "wlab/modulus.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wlab {

struct WhitneyOptions {
    ModulusOptions modulus;
    ApproxOptions approx;
    double undefined_below = 1e-9;  // modulus <= this * sup|f| makes the ratio undefined
};

struct RatioResult {
    bool defined = false;
    double ratio = 0;
    double error = 0;    // E_r(f; E)_p on the plan
    double modulus = 0;  // omega_E^r(f; diam)_p on the plan
    double t = 0;
    ModulusResult mod;
    ApproxResult approx;
};

// E_r(f;E)_p / omega_E^r(f, diam)_p.
RatioResult whitney_ratio(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const DirectionSet& E,
                          const PolySpaceBasis& basis, int r, double p, const WhitneyOptions& opt = {});

enum class FamilyKind { random_poly, ridge_log, perturbed_basis, list };
const char* to_string(FamilyKind k);

struct FamilySpec {
    FamilyKind kind = FamilyKind::random_poly;
    int size = 100;               // random_poly, perturbed_basis
    int degree = -1;              // random_poly; -1 means d(r-1)+3
    std::uint64_t seed = 1;
    std::vector<int> ns;          // ridge_log
    Point xi;                     // ridge_log
    double perturbation = 1e-2;   // perturbed_basis: weight of the degree-r part
    std::vector<SampledFunction> functions;  // list
};

// Materializes the family (for the list kind, the functions themselves).
std::vector<SampledFunction> family_members(const FamilySpec& fam, int d, int r, const PolySpaceBasis* basis = nullptr);

struct WhitneyEstimate {
    double lower_bound = 0;
    std::optional<double> upper_bound;
    double theta = 1;
    int witness = -1;  // index into the family
    std::string witness_spec;
    int n_defined = 0, n_tried = 0;
    std::vector<std::optional<double>> ratios;
    int r = 1;
    double p = 2;
    std::string domain_id, dirset_id;
    bool consistent = true;  // lower_bound <= upper_bound (+ tol) when an upper bound is attached
};

// Max of the defined ratios over the first `budget` family members (all when budget <= 0).
WhitneyEstimate empirical_whitney_constant(const Domain& dom, const SamplePlan& plan, const DirectionSet& E, int r,
                                           double p, const FamilySpec& family, int budget = 0,
                                           const WhitneyOptions& opt = {});

// Attaches an upper bound and re-evaluates consistency at relative tolerance tol.
void attach_upper_bound(WhitneyEstimate& est, double upper, double tol = 1e-9);

struct ChainBound {
    double recursion = 0;    // w_m from w_k^theta = 1 + 2^r w_{k-1}^theta
    double closed_form = 0;  // (2^{mr} w0^theta + (2^{mr}-1)/(2^r-1))^{1/theta}
    double theta = 1;
    int m = 0, r = 1;
    double w0 = 0;
    double p = 2;
    bool overflow = false;
    std::string w0_assumption;
};

ChainBound chain_upper_bound(int m, int r, double w0, double p);
// Throws PreconditionError for chains whose verification failed.
ChainBound chain_upper_bound(const VerifiedChain& chain, double w0, double p, const std::string& w0_assumption = "");

// The length factor C_{p,r} L^{r-1+2/p} of the parallelepiped estimate, with C_{p,r} left unknown.
struct LengthFactor {
    double exponent = 0;
    std::string text;
    double times_length(double L) const;  // L^exponent, the computable part
};
LengthFactor length_factor(int r, double p);

// {x : |x|(1 - eps) <= x.xi <= 1}
Domain counterexample_body(int d, const Point& xi, double eps);

struct CertificateRow {
    int n = 0;
    double modulus = 0;
    bool modulus_reliable = false;
    double floor = 0;       // (n - 2^{dr} ln(dr)) / 2^{dr}
    double numeric_er = 0;  // E_r(f_n; E)_inf on the plan
    bool growth_certified = false;  // numeric_er >= floor - 1e-6
};

struct CertificateOptions {
    int density = 8192;
    std::uint64_t seed = 1;
    WhitneyOptions whitney;
};

struct Certificate {
    double margin = 0;  // 1 - max over E u -E of eta.xi
    double eps = 0;
    int d = 0, r = 1;
    Point xi;
    std::vector<CertificateRow> rows;
    double modulus_ratio = 0;  // max modulus / modulus at the smallest n
    bool modulus_bounded = false;  // modulus_ratio <= 2
};

double divergence_floor(int n, int d, int r);

Certificate counterexample_certificate(int d, const Point& xi, double eps, const DirectionSet& E, int r,
                                       const std::vector<int>& ns, const CertificateOptions& opt = {});

}  // namespace wlab
