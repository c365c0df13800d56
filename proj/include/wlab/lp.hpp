#pragma once

#include "wlab/core.hpp"

namespace wlab {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::iteration_limit;
    Vec x;                  // primal solution
    Vec y;                  // multipliers of Ax <= b, y >= 0
    double objective = 0;   // c.x
    double dual_objective = 0;  // -b.y
    int iterations = 0;
};

// minimize c.x subject to A x <= b, x free.
// Solved as the dual standard-form problem with a two-phase revised simplex.
LpResult solve_lp(const Mat& A, const Vec& b, const Vec& c);

const char* to_string(LpStatus s);

}  // namespace wlab
