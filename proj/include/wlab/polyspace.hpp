#pragma once

#include "wlab/geometry.hpp"

#include <vector>

namespace wlab {

using Exponent = std::vector<int>;

// All multi-indices with |alpha| <= max_degree, graded, lexicographic inside a degree
// (x^2 before xy before y^2).
std::vector<Exponent> graded_monomials(int d, int max_degree);
int total_degree(const Exponent& a);

// (xi . grad)^r applied r times to a polynomial given over `exponents`.
Vec directional_power_derivative(const std::vector<Exponent>& exponents, const Vec& poly, const Point& xi, int r);
// The same operator as a matrix acting on coefficient vectors.
Mat directional_power_matrix(const std::vector<Exponent>& exponents, const Point& xi, int r);

struct PolySpaceBasis {
    int d = 0;
    int r = 0;
    std::vector<Exponent> exponents;
    Mat coeffs;  // n_basis x n_monomials, orthonormal rows
    DirectionSet dirset;

    int size() const { return static_cast<int>(coeffs.rows()); }
    int n_monomials() const { return static_cast<int>(exponents.size()); }
};

inline constexpr double kNullspaceCutoff = 1e-9;

PolySpaceBasis build_basis(int d, int r, const DirectionSet& E);

// Sum_k coeffs_k P_k(x).
double evaluate(const PolySpaceBasis& basis, const Vec& coeffs, const Point& x);
// Direct evaluation of a polynomial in the monomial frame (compensated summation).
double evaluate_monomials(const std::vector<Exponent>& exponents, const Vec& poly, const Point& x);
// Row k = values of every basis function at points[k].
Mat basis_values(const PolySpaceBasis& basis, const std::vector<Point>& points);
// Monomial-frame coefficients of Sum_k coeffs_k P_k.
Vec to_monomial(const PolySpaceBasis& basis, const Vec& coeffs);

// Norm of the part of `poly` orthogonal to the basis rows.
double membership_residual(const PolySpaceBasis& basis, const Vec& poly);

// Largest |D_xi^r P| coefficient over rows P and xi in the basis' own direction set.
double annihilation_residual(const PolySpaceBasis& basis);

}  // namespace wlab
