#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "persuasion/lp.hpp"

#include <random>

using namespace persuasion;

namespace {

// independent oracle: enumerate all constraint-pair intersections of a
// 2-variable LP (including the axes) and take the best feasible one
Rational vertex_enum_2d(const LinearProgram& lp) {
    std::vector<RatVec> lines;  // a1 x + a2 y = b
    for (std::size_t i = 0; i < lp.ub_A.size(); ++i)
        lines.push_back({lp.ub_A[i][0], lp.ub_A[i][1], lp.ub_b[i]});
    lines.push_back({1, 0, 0});
    lines.push_back({0, 1, 0});
    bool found = false;
    Rational best = 0;
    auto feasible = [&](const Rational& x, const Rational& y) {
        if (x < 0 || y < 0) return false;
        for (std::size_t i = 0; i < lp.ub_A.size(); ++i)
            if (lp.ub_A[i][0] * x + lp.ub_A[i][1] * y > lp.ub_b[i]) return false;
        return true;
    };
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            Rational det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
            if (det == 0) continue;
            Rational x = (lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det;
            Rational y = (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det;
            if (!feasible(x, y)) continue;
            Rational v = lp.objective[0] * x + lp.objective[1] * y;
            if (!found || v > best) best = v;
            found = true;
        }
    }
    REQUIRE(found);
    return best;
}

void check_residuals(const LinearProgram& lp, const LpSolution& sol) {
    for (std::size_t i = 0; i < lp.eq_A.size(); ++i)
        CHECK(dot(lp.eq_A[i], sol.point) == lp.eq_b[i]);
    for (std::size_t i = 0; i < lp.ub_A.size(); ++i)
        CHECK(dot(lp.ub_A[i], sol.point) <= lp.ub_b[i]);
    for (const auto& x : sol.point) CHECK(x >= 0);
    CHECK(dot(lp.objective, sol.point) == sol.value);
}

}  // namespace

TEST_CASE("single box constraint") {
    LinearProgram lp;
    lp.objective = {1};
    lp.ub_A = {{1}};
    lp.ub_b = {1};
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == 1);
    CHECK(sol.point == RatVec{1});
    check_residuals(lp, sol);
}

TEST_CASE("objective equals constraint") {
    LinearProgram lp;
    lp.objective = {1, 1};
    lp.eq_A = {{1, 1}};
    lp.eq_b = {1};
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == 1);
    check_residuals(lp, sol);
}

TEST_CASE("two-constraint maximization matches vertex enumeration") {
    LinearProgram lp;
    lp.objective = {2, 3};
    lp.ub_A = {{1, 1}, {1, 2}};
    lp.ub_b = {4, 6};
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == vertex_enum_2d(lp));
    CHECK(sol.value == 10);
    CHECK(sol.point == RatVec{2, 2});
    check_residuals(lp, sol);
}

TEST_CASE("infeasible and unbounded are reported by status") {
    LinearProgram lp;
    lp.objective = {1};
    lp.eq_A = {{0}};
    lp.eq_b = {1};
    CHECK(solve_lp(lp).status == LpStatus::infeasible);

    LinearProgram lp2;
    lp2.objective = {1};
    CHECK(solve_lp(lp2).status == LpStatus::unbounded);

    LinearProgram lp3;  // x + y = 1, x,y >= 0, x <= -1
    lp3.objective = {1, 0};
    lp3.eq_A = {{1, 1}};
    lp3.eq_b = {1};
    lp3.ub_A = {{1, 0}};
    lp3.ub_b = {-1};
    CHECK(solve_lp(lp3).status == LpStatus::infeasible);
}

TEST_CASE("degenerate cycling-prone LP terminates") {
    // classic Beale-style degeneracy
    LinearProgram lp;
    lp.objective = {Rational(3, 4), -150, Rational(1, 50), -6};
    lp.ub_A = {{Rational(1, 4), -60, Rational(-1, 25), 9},
               {Rational(1, 2), -90, Rational(-1, 50), 3},
               {0, 0, 1, 0}};
    lp.ub_b = {0, 0, 1};
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rational(1, 20));
    check_residuals(lp, sol);
}

TEST_CASE("transportation basics") {
    SUBCASE("1x1") {
        auto sol = solve_transportation({{7}}, {1}, {1});
        REQUIRE(sol.status == LpStatus::optimal);
        CHECK(sol.value == 7);
    }
    SUBCASE("2x2 diagonal cost") {
        RatMat cost = {{1, 0}, {0, 1}};
        auto sol = solve_transportation(cost, {Rational(1, 2), Rational(1, 2)},
                                        {Rational(1, 2), Rational(1, 2)});
        REQUIRE(sol.status == LpStatus::optimal);
        // the 2x2 transportation polytope has two permutation-like
        // vertices; the diagonal one carries mass 1/2 per diagonal cell
        CHECK(sol.value == 1);
        CHECK(sol.point[0] == Rational(1, 2));
        CHECK(sol.point[3] == Rational(1, 2));
    }
    SUBCASE("marginal mismatch rejected") {
        auto sol = solve_transportation({{1}}, {1}, {Rational(1, 2)});
        CHECK(sol.status == LpStatus::infeasible);
    }
    SUBCASE("row and column sums are hit exactly") {
        RatMat cost = {{3, -1, 2}, {0, 5, 1}};
        RatVec rows = {Rational(2, 3), Rational(1, 3)};
        RatVec cols = {Rational(1, 6), Rational(1, 2), Rational(1, 3)};
        auto sol = solve_transportation(cost, rows, cols);
        REQUIRE(sol.status == LpStatus::optimal);
        for (int i = 0; i < 2; ++i) {
            Rational rs = 0;
            for (int j = 0; j < 3; ++j) rs += sol.point[i * 3 + j];
            CHECK(rs == rows[i]);
        }
        for (int j = 0; j < 3; ++j) {
            Rational cs = 0;
            for (int i = 0; i < 2; ++i) cs += sol.point[i * 3 + j];
            CHECK(cs == cols[j]);
        }
    }
}

TEST_CASE("sender deviation LP of the two-message advisory game") {
    // messages weighted (1/2,1/2), responses a1/a2 worth 1/2 to a
    // state-independent sender; the optimum is 3/2 regardless of coupling
    RatMat cost = {{1, 2}, {1, 2}};
    auto sol = solve_transportation(cost, {Rational(1, 2), Rational(1, 2)},
                                    {Rational(1, 2), Rational(1, 2)});
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == Rational(3, 2));
}

TEST_CASE("convex hull basics") {
    SUBCASE("single point") {
        auto h = convex_hull_2d({{0, 0}});
        CHECK(h.size() == 1);
    }
    SUBCASE("collinear points collapse to a segment") {
        auto h = convex_hull_2d({{0, 0}, {1, 0}, {Rational(1, 2), 0}});
        REQUIRE(h.size() == 2);
        CHECK(h[0] == Point2{0, 0});
        CHECK(h[1] == Point2{1, 0});
    }
    SUBCASE("interior point removed, counter-clockwise order") {
        auto h = convex_hull_2d({{0, 0}, {1, 0}, {0, 1}, {Rational(1, 4), Rational(1, 4)}});
        REQUIRE(h.size() == 3);
        CHECK(h[0] == Point2{0, 0});
        CHECK(h[1] == Point2{1, 0});
        CHECK(h[2] == Point2{0, 1});
    }
    SUBCASE("idempotence") {
        std::vector<Point2> pts = {{0, 0},
                                   {2, 1},
                                   {1, 3},
                                   {Rational(1, 2), Rational(1, 2)},
                                   {2, 3},
                                   {0, 3},
                                   {1, 1}};
        auto h1 = convex_hull_2d(pts);
        auto h2 = convex_hull_2d(h1);
        CHECK(h1 == h2);
    }
}

TEST_CASE("hull membership") {
    CHECK(in_hull({Rational(1, 2), Rational(1, 2)}, {{0, 0}, {1, 1}}));
    CHECK_FALSE(in_hull({2, 0}, {{0, 0}, {1, 0}}));
    CHECK(in_hull({Rational(1, 3), Rational(1, 3)}, {{0, 0}, {1, 0}, {0, 1}}));
    CHECK_FALSE(in_hull({Rational(2, 3), Rational(2, 3)}, {{0, 0}, {1, 0}, {0, 1}}));
}

TEST_CASE("primal optimum equals dual optimum on random small LPs") {
    std::mt19937 gen(20240817);
    std::uniform_int_distribution<int> coef(-4, 4), bdist(0, 5);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 3, m = 1 + trial % 4;
        LinearProgram lp;
        lp.objective.resize(n);
        for (auto& c : lp.objective) c = coef(gen);
        for (int i = 0; i < m; ++i) {
            RatVec row(n);
            for (auto& a : row) a = coef(gen);
            lp.ub_A.push_back(row);
            lp.ub_b.push_back(bdist(gen));
        }
        for (int j = 0; j < n; ++j) {  // box to keep it bounded
            RatVec row(n, 0);
            row[j] = 1;
            lp.ub_A.push_back(row);
            lp.ub_b.push_back(7);
        }
        auto primal = solve_lp(lp);
        REQUIRE(primal.status == LpStatus::optimal);  // x = 0 is feasible

        // dual: min b.y s.t. A^T y >= c, y >= 0, solved as max -b.y
        const int md = static_cast<int>(lp.ub_A.size());
        LinearProgram dual;
        dual.objective.resize(md);
        for (int i = 0; i < md; ++i) dual.objective[i] = -lp.ub_b[i];
        for (int j = 0; j < n; ++j) {
            RatVec row(md);
            for (int i = 0; i < md; ++i) row[i] = -lp.ub_A[i][j];
            dual.ub_A.push_back(row);
            dual.ub_b.push_back(-lp.objective[j]);
        }
        auto d = solve_lp(dual);
        REQUIRE(d.status == LpStatus::optimal);
        CHECK(primal.value == -d.value);
    }
}
