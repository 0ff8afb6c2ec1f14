#pragma once

#include "persuasion/rational.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace persuasion {

// max objective . x  subject to  eq_A x = eq_b,  ub_A x <= ub_b,  x >= 0.
struct LinearProgram {
    RatVec objective;
    RatMat eq_A;
    RatVec eq_b;
    RatMat ub_A;
    RatVec ub_b;

    std::size_t num_vars() const { return objective.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Rational value = 0;
    RatVec point;           // basic feasible solution when optimal
    bool is_vertex = false;
};

// Two-phase primal simplex over exact rationals with Bland's pivot rule.
// Infeasibility and unboundedness are reported through the status field.
LpSolution solve_lp(const LinearProgram& lp);

// max sum_ij cost[i][j] w[i][j] over w >= 0 with fixed row and column sums.
// Status is infeasible when the marginals disagree (checked up front).
// The optimal point is returned flattened row-major.
LpSolution solve_transportation(const RatMat& cost, const RatVec& row_sums,
                                const RatVec& col_sums);

struct Point2 {
    Rational x;
    Rational y;
    bool operator==(const Point2& o) const { return x == o.x && y == o.y; }
    bool operator<(const Point2& o) const { return x < o.x || (x == o.x && y < o.y); }
};

// Counter-clockwise hull, exact comparisons, collinear interior points removed.
// Degenerate inputs collapse to their extreme points (one or two).
std::vector<Point2> convex_hull_2d(std::vector<Point2> points);

// Exact membership in the convex hull of `points`, decided by LP feasibility
// of the convex-weight equations.
bool in_hull(const Point2& p, const std::vector<Point2>& points);

// Exact solve of A x = b (A square or stacked consistent rows). Returns
// nullopt when the system is singular or inconsistent.
std::optional<RatVec> solve_linear_system(RatMat a, RatVec b);

}  // namespace persuasion
