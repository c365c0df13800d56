#pragma once

#include "wlab/modulus.hpp"
#include "wlab/polyspace.hpp"

namespace wlab {

enum class ApproxStatus { optimal, local_optimum, max_iter };
const char* to_string(ApproxStatus s);

struct ApproxResult {
    Vec coeffs;
    double error = 0;  // ||f - Q||_p on the plan
    double p = 2;
    ApproxStatus status = ApproxStatus::optimal;
    int iterations = 0;
    double duality_gap = 0;  // p = inf only
};

struct ApproxOptions {
    int max_iter = 500;
    double coeff_tol = 1e-9;
    double weight_clamp = 1e-10;  // relative to the largest residual
    int perturbations = 32;
    std::uint64_t seed = 0x5eed;
};

// Minimizes ||y - V c||_{p,w}; V is the design matrix (rows = sample points).
ApproxResult best_fit(const Mat& V, const Vec& y, const Vec& w, double p, const ApproxOptions& opt = {});

ApproxResult best_approx(const SampledFunction& f, const Domain& dom, const SamplePlan& plan, const PolySpaceBasis& basis,
                         double p, const ApproxOptions& opt = {});

struct Sample1d {
    double t, v, w;
};

// Best polynomial of degree r-1 in t. Coefficients are over 1, t, ..., t^{r-1}.
ApproxResult best_approx_1d(const std::vector<Sample1d>& samples, int r, double p, const ApproxOptions& opt = {});

}  // namespace wlab
