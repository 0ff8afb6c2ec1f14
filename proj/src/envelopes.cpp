#include "persuasion/envelopes.hpp"

#include "persuasion/lp.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace persuasion {

namespace {

// max sum w_j f(c_j) s.t. sum w_j c_j = pi, sum w_j = 1, w >= 0
CavResult concavify_over(const Scenario& s, const Belief& pi,
                         const std::vector<Belief>& candidates, bool exact) {
    const int k = static_cast<int>(candidates.size());
    const int n = s.n_states();
    LinearProgram lp;
    lp.objective.resize(k);
    for (int j = 0; j < k; ++j) lp.objective[j] = indirect_utility(s, candidates[j]);
    for (int w = 0; w < n; ++w) {
        RatVec row(k);
        for (int j = 0; j < k; ++j) row[j] = candidates[j][w];
        lp.eq_A.push_back(std::move(row));
        lp.eq_b.push_back(pi[w]);
    }
    {
        RatVec row(k, 1);
        lp.eq_A.push_back(std::move(row));
        lp.eq_b.push_back(1);
    }
    auto sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("cav_u: candidate LP infeasible");  // pi is always a candidate
    CavResult res;
    res.value = sol.value;
    res.exact = exact;
    for (int j = 0; j < k; ++j) {
        if (sol.point[j] > 0) {
            res.split.posteriors.push_back(candidates[j]);
            res.split.weights.push_back(sol.point[j]);
        }
    }
    return res;
}

void barycentric_grid(int dims, long den, long left, RatVec& acc, std::vector<Belief>& out) {
    if (dims == 1) {
        acc.push_back(Rational(left, den));
        out.push_back(Belief(acc));
        acc.pop_back();
        return;
    }
    for (long k = 0; k <= left; ++k) {
        acc.push_back(Rational(k, den));
        barycentric_grid(dims - 1, den, left - k, acc, out);
        acc.pop_back();
    }
}

}  // namespace

CavResult cav_u(const Scenario& s, const Belief& pi, long grid_den) {
    if (pi.size() != s.n_states()) throw std::invalid_argument("cav_u: belief dimension");
    std::vector<Belief> candidates;
    if (s.n_states() == 2) {
        std::set<Rational> xs = {Rational(0), Rational(1), pi.second()};
        for (const auto& b : br_breakpoints(s)) xs.insert(b);
        for (const auto& x : xs) candidates.push_back(Belief::binary(x));
        return concavify_over(s, pi, candidates, true);
    }
    if (grid_den < 1) throw std::invalid_argument("cav_u: grid denominator must be positive");
    RatVec acc;
    barycentric_grid(s.n_states(), grid_den, grid_den, acc, candidates);
    candidates.push_back(pi);
    return concavify_over(s, pi, candidates, false);
}

Rational quasicav_u(const Scenario& s, const Belief& pi) {
    if (s.n_states() != 2)
        throw std::invalid_argument("quasicav_u: binary-state scenarios only");
    const Rational target = pi.second();

    // Exact piecewise-linear form of the indirect utility over [0,1]:
    // isolated points at the best-response breakpoints (upper values under
    // sender tie-breaking) plus open segments between them. Within a
    // best-response region the utility is the upper envelope of the optimal
    // actions' payoff lines, so segments split at sender-line crossings.
    struct PointVal {
        Rational x, v;
    };
    struct Segment {
        Rational lo, hi;  // value c0 + c1 p on (lo, hi)
        Rational c0, c1;
    };
    std::vector<Rational> cuts = {Rational(0)};
    for (const auto& b : br_breakpoints(s)) cuts.push_back(b);
    cuts.push_back(1);

    std::vector<PointVal> points;
    for (const auto& c : cuts) points.push_back({c, indirect_utility(s, Belief::binary(c))});

    std::vector<Segment> segments;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const Rational lo = cuts[k], hi = cuts[k + 1];
        auto acts = best_responses(s, Belief::binary((lo + hi) / 2)).first;
        std::vector<std::pair<Rational, Rational>> lines;  // (c0, c1)
        for (int a : acts) lines.push_back({s.u_S[0][a], s.u_S[1][a] - s.u_S[0][a]});

        std::set<Rational> xs = {lo, hi};
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                Rational dc1 = lines[i].second - lines[j].second;
                if (dc1 == 0) continue;
                Rational x = (lines[j].first - lines[i].first) / dc1;
                if (x > lo && x < hi) xs.insert(x);
            }
        std::vector<Rational> grid(xs.begin(), xs.end());
        for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
            Rational mid = (grid[g] + grid[g + 1]) / 2;
            std::size_t best = 0;
            Rational best_v = lines[0].first + lines[0].second * mid;
            for (std::size_t i = 1; i < lines.size(); ++i) {
                Rational v = lines[i].first + lines[i].second * mid;
                if (v > best_v) {
                    best_v = v;
                    best = i;
                }
            }
            segments.push_back({grid[g], grid[g + 1], lines[best].first, lines[best].second});
        }
    }

    // candidate levels: utility values at all piece endpoints and at the
    // prior itself (the envelope equals one of these)
    std::set<Rational, std::greater<Rational>> levels;
    for (const auto& p : points) levels.insert(p.v);
    for (const auto& seg : segments) {
        levels.insert(seg.c0 + seg.c1 * seg.lo);
        levels.insert(seg.c0 + seg.c1 * seg.hi);
    }
    levels.insert(indirect_utility(s, pi));

    for (const auto& t : levels) {
        bool any = false;
        Rational lo = 0, hi = 0;
        auto absorb = [&](const Rational& x) {
            if (!any) {
                lo = hi = x;
                any = true;
            } else {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        };
        for (const auto& p : points)
            if (p.v >= t) absorb(p.x);
        for (const auto& seg : segments) {
            // closed clipping is safe: the utility is upper semicontinuous,
            // so segment endpoints are covered by point values
            Rational a = seg.lo, b = seg.hi;
            if (seg.c1 == 0) {
                if (seg.c0 < t) continue;
            } else {
                Rational x = (t - seg.c0) / seg.c1;  // where the line meets t
                if (seg.c1 > 0)
                    a = std::max(a, x);
                else
                    b = std::min(b, x);
                if (a > b) continue;
            }
            absorb(a);
            absorb(b);
        }
        if (!any) continue;
        if (in_hull({target, 0}, {{lo, 0}, {hi, 0}})) return t;
    }
    throw std::logic_error("quasicav_u: no level set contains the prior");
}

}  // namespace persuasion
