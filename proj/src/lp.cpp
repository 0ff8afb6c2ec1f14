#include "persuasion/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace persuasion {

namespace {

// Dense tableau. Columns: structural vars, then slacks, then artificials.
struct Tableau {
    int rows = 0;
    int cols = 0;
    std::vector<RatVec> a;   // rows x cols
    RatVec rhs;              // rows, kept >= 0
    std::vector<int> basis;  // basic column per row

    void pivot(int pr, int pc) {
        const Rational piv = a[pr][pc];
        for (int j = 0; j < cols; ++j) a[pr][j] /= piv;
        rhs[pr] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == pr || a[i][pc] == 0) continue;
            const Rational f = a[i][pc];
            for (int j = 0; j < cols; ++j) a[i][j] -= f * a[pr][j];
            rhs[i] -= f * rhs[pr];
        }
        basis[pr] = pc;
    }
};

// Maximizes c.x over the tableau with Bland's rule. `allowed` masks columns
// the pivot may enter. Returns false when unbounded.
bool run_simplex(Tableau& t, const RatVec& c, const std::vector<bool>& allowed) {
    while (true) {
        // reduced costs from scratch; desk-scale problems make this cheap
        int enter = -1;
        for (int j = 0; j < t.cols && enter < 0; ++j) {
            if (!allowed[j]) continue;
            bool basic = false;
            for (int i = 0; i < t.rows; ++i)
                if (t.basis[i] == j) { basic = true; break; }
            if (basic) continue;
            Rational red = c[j];
            for (int i = 0; i < t.rows; ++i)
                if (c[t.basis[i]] != 0 && t.a[i][j] != 0) red -= c[t.basis[i]] * t.a[i][j];
            if (red > 0) enter = j;  // Bland: lowest improving index
        }
        if (enter < 0) return true;

        int leave = -1;
        Rational best_ratio = 0;
        for (int i = 0; i < t.rows; ++i) {
            if (t.a[i][enter] <= 0) continue;
            Rational ratio = t.rhs[i] / t.a[i][enter];
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio && t.basis[i] < t.basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return false;
        t.pivot(leave, enter);
    }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    const int n = static_cast<int>(lp.num_vars());
    const int m_eq = static_cast<int>(lp.eq_A.size());
    const int m_ub = static_cast<int>(lp.ub_A.size());
    if (lp.eq_b.size() != lp.eq_A.size() || lp.ub_b.size() != lp.ub_A.size())
        throw std::invalid_argument("solve_lp: rhs size mismatch");
    for (const auto& row : lp.eq_A)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("solve_lp: ragged eq row");
    for (const auto& row : lp.ub_A)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("solve_lp: ragged ub row");

    const int m = m_eq + m_ub;
    Tableau t;
    t.rows = m;
    t.cols = n + m_ub;  // artificials appended below
    t.a.assign(m, RatVec(t.cols, 0));
    t.rhs.assign(m, Rational(0));
    t.basis.assign(m, -1);

    for (int i = 0; i < m_eq; ++i) {
        for (int j = 0; j < n; ++j) t.a[i][j] = lp.eq_A[i][j];
        t.rhs[i] = lp.eq_b[i];
    }
    for (int i = 0; i < m_ub; ++i) {
        for (int j = 0; j < n; ++j) t.a[m_eq + i][j] = lp.ub_A[i][j];
        t.a[m_eq + i][n + i] = 1;  // slack
        t.rhs[m_eq + i] = lp.ub_b[i];
    }
    for (int i = 0; i < m; ++i) {
        if (t.rhs[i] < 0) {
            for (auto& v : t.a[i]) v = -v;
            t.rhs[i] = -t.rhs[i];
        }
    }

    // slack can start basic only where its coefficient stayed +1
    std::vector<int> needs_art;
    for (int i = 0; i < m; ++i) {
        if (i >= m_eq && t.a[i][n + (i - m_eq)] == 1)
            t.basis[i] = n + (i - m_eq);
        else
            needs_art.push_back(i);
    }
    const int art0 = t.cols;
    t.cols += static_cast<int>(needs_art.size());
    for (auto& row : t.a) row.resize(t.cols, Rational(0));
    for (std::size_t k = 0; k < needs_art.size(); ++k) {
        t.a[needs_art[k]][art0 + static_cast<int>(k)] = 1;
        t.basis[needs_art[k]] = art0 + static_cast<int>(k);
    }

    std::vector<bool> allowed(t.cols, true);
    if (!needs_art.empty()) {
        RatVec c1(t.cols, 0);
        for (int j = art0; j < t.cols; ++j) c1[j] = -1;
        run_simplex(t, c1, allowed);  // phase 1 is always bounded
        Rational infeas = 0;
        for (int i = 0; i < t.rows; ++i)
            if (t.basis[i] >= art0) infeas += t.rhs[i];
        if (infeas > 0) {
            LpSolution s;
            s.status = LpStatus::infeasible;
            return s;
        }
        // drive residual artificials out of the basis; drop redundant rows
        for (int i = 0; i < t.rows;) {
            if (t.basis[i] < art0) { ++i; continue; }
            int pc = -1;
            for (int j = 0; j < art0 && pc < 0; ++j)
                if (t.a[i][j] != 0) pc = j;
            if (pc >= 0) {
                t.pivot(i, pc);
                ++i;
            } else {
                t.a.erase(t.a.begin() + i);
                t.rhs.erase(t.rhs.begin() + i);
                t.basis.erase(t.basis.begin() + i);
                --t.rows;
            }
        }
        for (int j = art0; j < t.cols; ++j) allowed[j] = false;
    }

    RatVec c2(t.cols, 0);
    for (int j = 0; j < n; ++j) c2[j] = lp.objective[j];
    if (!run_simplex(t, c2, allowed)) {
        LpSolution s;
        s.status = LpStatus::unbounded;
        return s;
    }

    LpSolution s;
    s.status = LpStatus::optimal;
    s.point.assign(n, Rational(0));
    for (int i = 0; i < t.rows; ++i)
        if (t.basis[i] < n) s.point[t.basis[i]] = t.rhs[i];
    s.value = dot(lp.objective, s.point);
    s.is_vertex = true;
    return s;
}

LpSolution solve_transportation(const RatMat& cost, const RatVec& row_sums,
                                const RatVec& col_sums) {
    const int nr = static_cast<int>(row_sums.size());
    const int nc = static_cast<int>(col_sums.size());
    if (static_cast<int>(cost.size()) != nr)
        throw std::invalid_argument("solve_transportation: cost rows mismatch");
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != nc)
            throw std::invalid_argument("solve_transportation: cost cols mismatch");
    for (const auto& v : row_sums)
        if (v < 0) throw std::invalid_argument("solve_transportation: negative row sum");
    for (const auto& v : col_sums)
        if (v < 0) throw std::invalid_argument("solve_transportation: negative col sum");
    if (vec_sum(row_sums) != vec_sum(col_sums)) {
        LpSolution s;
        s.status = LpStatus::infeasible;
        return s;
    }

    LinearProgram lp;
    lp.objective.assign(nr * nc, Rational(0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) lp.objective[i * nc + j] = cost[i][j];
    for (int i = 0; i < nr; ++i) {
        RatVec row(nr * nc, 0);
        for (int j = 0; j < nc; ++j) row[i * nc + j] = 1;
        lp.eq_A.push_back(std::move(row));
        lp.eq_b.push_back(row_sums[i]);
    }
    for (int j = 0; j < nc; ++j) {
        RatVec row(nr * nc, 0);
        for (int i = 0; i < nr; ++i) row[i * nc + j] = 1;
        lp.eq_A.push_back(std::move(row));
        lp.eq_b.push_back(col_sums[j]);
    }
    return solve_lp(lp);
}

static Rational cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::vector<Point2> convex_hull_2d(std::vector<Point2> pts) {
    if (pts.empty()) throw std::invalid_argument("convex_hull_2d: no points");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const int n = static_cast<int>(pts.size());
    if (n <= 2) return pts;

    std::vector<Point2> hull(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (int i = n - 2, lower = k + 1; i >= 0; --i) {  // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

bool in_hull(const Point2& p, const std::vector<Point2>& points) {
    if (points.empty()) throw std::invalid_argument("in_hull: no points");
    const int n = static_cast<int>(points.size());
    LinearProgram lp;
    lp.objective.assign(n, Rational(0));
    RatVec ones(n, 1), xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    lp.eq_A = {ones, xs, ys};
    lp.eq_b = {Rational(1), p.x, p.y};
    return solve_lp(lp).status == LpStatus::optimal;
}

std::optional<RatVec> solve_linear_system(RatMat a, RatVec b) {
    const int rows = static_cast<int>(a.size());
    if (rows == 0) return std::nullopt;
    const int cols = static_cast<int>(a[0].size());
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("ragged system");

    int rank = 0;
    std::vector<int> pivot_col;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pr = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][c] != 0) { pr = r; break; }
        if (pr < 0) continue;
        std::swap(a[pr], a[rank]);
        std::swap(b[pr], b[rank]);
        const Rational piv = a[rank][c];
        for (int j = 0; j < cols; ++j) a[rank][j] /= piv;
        b[rank] /= piv;
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][c] == 0) continue;
            const Rational f = a[r][c];
            for (int j = 0; j < cols; ++j) a[r][j] -= f * a[rank][j];
            b[r] -= f * b[rank];
        }
        pivot_col.push_back(c);
        ++rank;
    }
    if (rank < cols) return std::nullopt;  // underdetermined
    for (int r = rank; r < rows; ++r)
        if (b[r] != 0) return std::nullopt;  // inconsistent
    RatVec x(cols, 0);
    for (int r = 0; r < rank; ++r) x[pivot_col[r]] = b[r];
    return x;
}

}  // namespace persuasion
