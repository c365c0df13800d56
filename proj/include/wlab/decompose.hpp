#pragma once

#include "wlab/geometry.hpp"

#include <string>
#include <vector>

namespace wlab {

// Pieces E_0..E_m with shifts h_1..h_m; piece k must satisfy
// E_k - j h_k in E_0 u ... u E_{k-1} for j = 1..r.
struct DecompositionChain {
    std::vector<Domain> pieces;
    std::vector<Point> shifts;  // shifts[k-1] goes with pieces[k]
    int r = 1;
    DirectionSet dirset;
    std::string provenance;
    Domain target;                        // the set the pieces should cover (optional)
    std::vector<std::vector<int>> hints;  // per piece: earlier pieces to try first (optional)

    int m() const { return pieces.empty() ? 0 : static_cast<int>(pieces.size()) - 1; }
    int dim() const { return pieces.empty() ? 0 : pieces[0].dim(); }
    // Appends a piece; returns its index.
    int add(const Domain& piece, const Point& shift, std::vector<int> hint = {});
};

struct ChainReport {
    bool ok = false;
    double worst_violation = 0;  // estimated distance of the worst back-shifted point from the union
    std::vector<Point> witnesses;
    std::vector<int> bad_pieces;
    long samples = 0;
    int empty_pieces = 0;       // pieces where rejection sampling found nothing
    bool shifts_in_dirset = true;
    double coverage_miss = -1;  // fraction of target samples outside every piece, -1 if not checked
    bool coverage_ok = true;
};

struct VerifyOptions {
    int samples_per_piece = 10000;
    int coverage_samples = 100000;
    double coverage_tolerance = 1e-3;
    std::uint64_t seed = 17;
    int max_witnesses = 16;
};

ChainReport verify_chain(const DecompositionChain& chain, const VerifyOptions& opt = {});

// Fraction of n target samples that fall outside every piece.
double chain_coverage_miss(const DecompositionChain& chain, const Domain& target, int n, std::uint64_t seed);

struct VerifiedChain {
    DecompositionChain chain;
    ChainReport report;
};
VerifiedChain verified(DecompositionChain chain, const VerifyOptions& opt = {});

// Thrown when X-ray illumination fails; carries the unilluminated boundary points.
class XrayFailure : public PreconditionError {
public:
    XrayFailure(const std::string& what, std::vector<Point> w) : PreconditionError(what), witnesses(std::move(w)) {}
    std::vector<Point> witnesses;
};

// Unit directions whose chord-distance cover of S^{d-1} has gap at most rho.
std::vector<Point> sphere_cover(int d, double rho, std::uint64_t seed = 1);

// dom with B_1[0] inside and dom inside B_R[0].
DecompositionChain star_shaped_decomposition(const Domain& dom, double R, int r, std::uint64_t seed = 1);

struct PlanarChain {
    DecompositionChain chain;
    DirectionSet dirs;  // {xi_1 along a diameter, xi_2 perpendicular}
    double margin = 0;
};
PlanarChain planar_two_direction_chain(const Domain& dom, int r);

// E_0 = B(c, rho) followed by the cone slices of sigma B(c, rho) for xi in E u -E.
DecompositionChain ball_direction_slices(const Point& c, double rho, const DirectionSet& E, int r);
double slice_sigma(double spread, int r);

struct Lip2Options {
    int check_samples = 4000;
    std::uint64_t seed = 3;
};
DecompositionChain lip2_ball_chain(const Domain& dom, const DirectionSet& E, int r, double delta, double eps,
                                   const Lip2Options& opt = {});

struct XrayOptions {
    int boundary_samples = 2000;
    int coverage_samples = 20000;
    int max_n0 = 12;
    std::uint64_t seed = 5;
};
// n0 <= 0 searches n0 = 1, 2, ... up to max_n0.
DecompositionChain xray_slab_decomposition(const Domain& dom, const DirectionSet& E, int n0, int r,
                                           const XrayOptions& opt = {});

}  // namespace wlab
