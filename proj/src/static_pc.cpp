#include "persuasion/static_pc.hpp"

#include "persuasion/lp.hpp"

#include <algorithm>
#include <stdexcept>

namespace persuasion {

void PosteriorFamily::check_plausible(const Belief& pi) const {
    if (lambda.size() != posteriors.size())
        throw std::invalid_argument("family: lambda/posterior size mismatch");
    Rational lsum = 0;
    for (const auto& l : lambda) {
        if (l < 0) throw std::invalid_argument("family: negative lambda entry");
        lsum += l;
    }
    if (lsum != 1) throw std::invalid_argument("family: lambda must sum to 1");
    RatVec mean(pi.size(), 0);
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        if (lambda[m] == 0) continue;
        if (posteriors[m].size() != pi.size())
            throw std::invalid_argument("family: posterior dimension mismatch");
        for (int w = 0; w < pi.size(); ++w) mean[w] += lambda[m] * posteriors[m][w];
    }
    for (int w = 0; w < pi.size(); ++w)
        if (mean[w] != pi[w])
            throw std::invalid_argument("family: posteriors do not average to the prior");
}

Rational ResponseRule::cost(const Scenario& s, const RatMat& u, int state, int msg) const {
    if (mixed) {
        Rational v = 0;
        for (int a = 0; a < s.n_actions(); ++a) v += (*mixed)[msg][a] * u[state][a];
        return v;
    }
    return u[state][action.at(msg)];
}

std::string ResponseRule::describe(const Scenario& s, const RatVec& lambda) const {
    std::string out;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        if (lambda[m] == 0) continue;
        if (!out.empty()) out += " ";
        out += s.messages[m] + "->" + s.actions[action.at(m)];
    }
    return out.empty() ? "-" : out;
}

Rational PosteriorFamily::sender_value(const Scenario& s, const ResponseRule& kappa) const {
    Rational v = 0;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        if (lambda[m] == 0) continue;
        for (int w = 0; w < s.n_states(); ++w)
            v += lambda[m] * posteriors[m][w] * kappa.cost(s, s.u_S, w, static_cast<int>(m));
    }
    return v;
}

Rational PosteriorFamily::receiver_value(const Scenario& s, const ResponseRule& kappa) const {
    Rational v = 0;
    for (std::size_t m = 0; m < lambda.size(); ++m) {
        if (lambda[m] == 0) continue;
        for (int w = 0; w < s.n_states(); ++w)
            v += lambda[m] * posteriors[m][w] * kappa.cost(s, s.u_R, w, static_cast<int>(m));
    }
    return v;
}

void Outcome::check(const Scenario& s) const {
    if (static_cast<int>(nu.size()) != s.n_states())
        throw std::invalid_argument("outcome: wrong number of state rows");
    Rational total = 0;
    for (const auto& row : nu) {
        if (static_cast<int>(row.size()) != s.n_actions())
            throw std::invalid_argument("outcome: wrong number of action columns");
        for (const auto& v : row) {
            if (v < 0) throw std::invalid_argument("outcome: negative mass");
            total += v;
        }
    }
    if (total != 1) throw std::invalid_argument("outcome: mass must equal 1");
}

RatVec Outcome::state_marginal() const {
    RatVec m(nu.size(), 0);
    for (std::size_t w = 0; w < nu.size(); ++w)
        for (const auto& v : nu[w]) m[w] += v;
    return m;
}

Rational Outcome::expected(const RatMat& u) const {
    Rational v = 0;
    for (std::size_t w = 0; w < nu.size(); ++w)
        for (std::size_t a = 0; a < nu[w].size(); ++a) v += nu[w][a] * u[w][a];
    return v;
}

Outcome Outcome::from_family(const Scenario& s, const PosteriorFamily& f,
                             const ResponseRule& kappa) {
    Outcome out;
    out.nu.assign(s.n_states(), RatVec(s.n_actions(), 0));
    for (std::size_t m = 0; m < f.lambda.size(); ++m) {
        if (f.lambda[m] == 0) continue;
        for (int w = 0; w < s.n_states(); ++w) {
            if (kappa.mixed) {
                for (int a = 0; a < s.n_actions(); ++a)
                    out.nu[w][a] += f.lambda[m] * f.posteriors[m][w] * (*kappa.mixed)[m][a];
            } else {
                out.nu[w][kappa.action.at(m)] += f.lambda[m] * f.posteriors[m][w];
            }
        }
    }
    return out;
}

namespace {

void check_marginal_inputs(const Scenario& s, const Belief& pi, const RatVec& lambda) {
    if (pi.size() != s.n_states()) throw std::invalid_argument("prior dimension mismatch");
    if (static_cast<int>(lambda.size()) != s.n_messages())
        throw std::invalid_argument("lambda dimension mismatch");
    Rational sum = 0;
    for (const auto& l : lambda) {
        if (l < 0) throw std::invalid_argument("lambda: negative entry");
        sum += l;
    }
    if (sum != 1) throw std::invalid_argument("lambda must sum to 1");
}

// Constraint system over w(state, message) >= 0 with marginals (pi, lambda)
// and, optionally, obedience of kappa at each supported message.
struct JointLp {
    int ns, nm;
    LinearProgram lp;

    int var(int w, int m) const { return w * nm + m; }
};

JointLp joint_polytope(const Scenario& s, const Belief& pi, const RatVec& lambda,
                       const ResponseRule* kappa_for_obedience) {
    JointLp j;
    j.ns = s.n_states();
    j.nm = s.n_messages();
    const int nv = j.ns * j.nm;
    j.lp.objective.assign(nv, Rational(0));
    for (int w = 0; w < j.ns; ++w) {
        RatVec row(nv, 0);
        for (int m = 0; m < j.nm; ++m) row[j.var(w, m)] = 1;
        j.lp.eq_A.push_back(std::move(row));
        j.lp.eq_b.push_back(pi[w]);
    }
    for (int m = 0; m < j.nm; ++m) {
        RatVec row(nv, 0);
        for (int w = 0; w < j.ns; ++w) row[j.var(w, m)] = 1;
        j.lp.eq_A.push_back(std::move(row));
        j.lp.eq_b.push_back(lambda[m]);
    }
    if (kappa_for_obedience) {
        for (int m = 0; m < j.nm; ++m) {
            if (lambda[m] == 0) continue;
            const int chosen = kappa_for_obedience->action.at(m);
            for (int b = 0; b < s.n_actions(); ++b) {
                if (b == chosen) continue;
                RatVec row(nv, 0);
                for (int w = 0; w < j.ns; ++w)
                    row[j.var(w, m)] = s.u_R[w][b] - s.u_R[w][chosen];
                j.lp.ub_A.push_back(std::move(row));
                j.lp.ub_b.push_back(0);
            }
        }
    }
    return j;
}

RatVec sender_objective(const Scenario& s, const JointLp& j, const ResponseRule& kappa) {
    RatVec c(j.ns * j.nm, 0);
    for (int w = 0; w < j.ns; ++w)
        for (int m = 0; m < j.nm; ++m) c[j.var(w, m)] = kappa.cost(s, s.u_S, w, m);
    return c;
}

PosteriorFamily family_from_point(const Scenario& s, const RatVec& lambda, const RatVec& w,
                                  const Belief& pi) {
    PosteriorFamily f;
    f.lambda = lambda;
    for (int m = 0; m < s.n_messages(); ++m) {
        if (lambda[m] == 0) {
            f.posteriors.push_back(pi);  // placeholder, ignored downstream
            continue;
        }
        RatVec p(s.n_states());
        for (int ww = 0; ww < s.n_states(); ++ww) p[ww] = w[ww * s.n_messages() + m] / lambda[m];
        f.posteriors.push_back(Belief(p));
    }
    return f;
}

}  // namespace

Rational sender_value_given_kappa(const Scenario& s, const Belief& pi, const RatVec& lambda,
                                  const ResponseRule& kappa) {
    check_marginal_inputs(s, pi, lambda);
    RatMat cost(s.n_states(), RatVec(s.n_messages()));
    for (int w = 0; w < s.n_states(); ++w)
        for (int m = 0; m < s.n_messages(); ++m) cost[w][m] = kappa.cost(s, s.u_S, w, m);
    auto sol = solve_transportation(cost, pi.p, lambda);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("sender_value_given_kappa: transportation LP failed");
    return sol.value;
}

std::optional<EquilibriumRecord> equilibrium_for_kappa(const Scenario& s, const Belief& pi,
                                                       const RatVec& lambda,
                                                       const ResponseRule& kappa) {
    check_marginal_inputs(s, pi, lambda);
    if (kappa.mixed) throw std::invalid_argument("equilibrium_for_kappa: pure rules only");
    const Rational unconstrained = sender_value_given_kappa(s, pi, lambda, kappa);

    JointLp j = joint_polytope(s, pi, lambda, &kappa);
    j.lp.objective = sender_objective(s, j, kappa);
    auto sol = solve_lp(j.lp);
    if (sol.status != LpStatus::optimal) return std::nullopt;  // obedience infeasible
    if (sol.value != unconstrained) return std::nullopt;       // profitable deviation exists

    EquilibriumRecord rec;
    rec.lambda = lambda;
    rec.kappa = kappa;
    rec.sender_value = unconstrained;
    rec.witness = family_from_point(s, lambda, sol.point, pi);

    // receiver range over the sender-argmax face: pin the sender objective
    // with a pair of inequalities and optimize the receiver payoff both ways
    JointLp face = joint_polytope(s, pi, lambda, &kappa);
    RatVec sobj = sender_objective(s, face, kappa);
    face.lp.ub_A.push_back(sobj);
    face.lp.ub_b.push_back(unconstrained);
    RatVec neg(sobj.size());
    for (std::size_t i = 0; i < sobj.size(); ++i) neg[i] = -sobj[i];
    face.lp.ub_A.push_back(std::move(neg));
    face.lp.ub_b.push_back(-unconstrained);

    RatVec robj(face.ns * face.nm, 0);
    for (int w = 0; w < face.ns; ++w)
        for (int m = 0; m < face.nm; ++m) robj[face.var(w, m)] = kappa.cost(s, s.u_R, w, m);
    face.lp.objective = robj;
    auto hi = solve_lp(face.lp);
    for (auto& v : face.lp.objective) v = -v;
    auto lo = solve_lp(face.lp);
    if (hi.status != LpStatus::optimal || lo.status != LpStatus::optimal)
        throw std::logic_error("equilibrium_for_kappa: receiver range LP failed");
    rec.receiver_range = {-lo.value, hi.value};
    return rec;
}

std::vector<EquilibriumRecord> enumerate_equilibria(const Scenario& s, const Belief& pi,
                                                    const RatVec& lambda, long kappa_cap) {
    check_marginal_inputs(s, pi, lambda);
    std::vector<int> supp;
    for (int m = 0; m < s.n_messages(); ++m)
        if (lambda[m] > 0) supp.push_back(m);

    double count = 1;
    for (std::size_t i = 0; i < supp.size(); ++i) {
        count *= s.n_actions();
        if (count > static_cast<double>(kappa_cap))
            throw std::invalid_argument("enumerate_equilibria: |A|^|supp(lambda)| exceeds cap " +
                                        std::to_string(kappa_cap));
    }

    std::vector<EquilibriumRecord> records;
    std::vector<int> odo(supp.size(), 0);
    while (true) {
        ResponseRule kappa;
        kappa.action.assign(s.n_messages(), 0);
        for (std::size_t i = 0; i < supp.size(); ++i) kappa.action[supp[i]] = odo[i];
        if (auto rec = equilibrium_for_kappa(s, pi, lambda, kappa)) records.push_back(*rec);

        std::size_t d = 0;
        while (d < odo.size() && ++odo[d] == s.n_actions()) odo[d++] = 0;
        if (d == odo.size()) break;
    }

    // canonical babbling witness: all posteriors at the prior, constant rule
    // at a sender-preferred best response to the prior
    auto [brs, brval] = best_responses(s, pi);
    (void)brval;
    int a_star = brs[0];
    Rational best_s;
    bool first = true;
    for (int a : brs) {
        Rational v = 0;
        for (int w = 0; w < s.n_states(); ++w) v += pi[w] * s.u_S[w][a];
        if (first || v > best_s) {
            a_star = a;
            best_s = v;
            first = false;
        }
    }
    bool found = false;
    for (auto& rec : records) {
        bool constant = true;
        for (int m : supp)
            if (rec.kappa.action[m] != a_star) constant = false;
        if (constant) {
            PosteriorFamily babble;
            babble.lambda = lambda;
            babble.posteriors.assign(s.n_messages(), pi);
            if (rec.sender_value != babble.sender_value(s, rec.kappa))
                throw std::logic_error("enumerate_equilibria: babbling value mismatch");
            rec.witness = babble;
            found = true;
            break;
        }
    }
    if (!found) throw std::logic_error("enumerate_equilibria: babbling record missing");
    return records;
}

Rational sender_optimal(const Scenario& s, const Belief& pi, const RatVec& lambda) {
    auto records = enumerate_equilibria(s, pi, lambda);
    Rational best = records.front().sender_value;
    for (const auto& r : records) best = std::max(best, r.sender_value);
    return best;
}

std::vector<SweepPoint> lambda_sweep(const Scenario& s, const Belief& pi,
                                     const std::vector<RatVec>& lambdas) {
    std::vector<SweepPoint> out;
    for (const auto& lambda : lambdas) {
        auto records = enumerate_equilibria(s, pi, lambda);
        const EquilibriumRecord* best = &records.front();
        for (const auto& r : records)
            if (r.sender_value > best->sender_value) best = &r;
        out.push_back({lambda, best->sender_value, best->receiver_range, best->kappa});
    }
    return out;
}

std::vector<SweepPoint> lambda_sweep(const Scenario& s, const Belief& pi, long D) {
    if (s.n_messages() != 2)
        throw std::invalid_argument("lambda_sweep: grid form needs binary messages");
    if (D < 1) throw std::invalid_argument("lambda_sweep: D must be positive");
    std::vector<RatVec> lambdas;
    for (long k = 0; k <= D; ++k) lambdas.push_back({Rational(k, D), Rational(D - k, D)});
    return lambda_sweep(s, pi, lambdas);
}

std::vector<Point2> payoff_hull(const Scenario& s, const Belief& pi, long D) {
    std::vector<Point2> pts;
    for (long k = 0; k <= D; ++k) {
        RatVec lambda = {Rational(k, D), Rational(D - k, D)};
        for (const auto& rec : enumerate_equilibria(s, pi, lambda)) {
            pts.push_back({rec.sender_value, rec.receiver_range.first});
            pts.push_back({rec.sender_value, rec.receiver_range.second});
        }
    }
    return convex_hull_2d(pts);
}

std::vector<Point2> sweep_value_hull(const std::vector<SweepPoint>& sweep) {
    std::vector<Point2> pts;
    for (const auto& pt : sweep) pts.push_back({pt.lambda.at(0), pt.best_sender});
    return convex_hull_2d(pts);
}

VerifyReport verify_family(const Scenario& s, const Belief& pi, const PosteriorFamily& family,
                           const ResponseRule& kappa) {
    family.check_plausible(pi);
    if (kappa.mixed) {
        if (static_cast<int>(kappa.mixed->size()) != s.n_messages())
            throw std::invalid_argument("verify_family: mixed rule has wrong message count");
        for (const auto& row : *kappa.mixed) {
            if (static_cast<int>(row.size()) != s.n_actions())
                throw std::invalid_argument("verify_family: mixed rule row dimension");
            Rational sum = 0;
            for (const auto& v : row) {
                if (v < 0) throw std::invalid_argument("verify_family: negative mixture weight");
                sum += v;
            }
            if (sum != 1) throw std::invalid_argument("verify_family: mixed rule row must sum to 1");
        }
    }

    VerifyReport rep;
    rep.eq_r_residual.assign(s.n_messages(), Rational(0));
    for (int m = 0; m < s.n_messages(); ++m) {
        if (family.lambda[m] == 0) continue;
        const Belief& p = family.posteriors[m];
        auto [acts, best] = best_responses(s, p);
        (void)acts;
        Rational got = 0;
        for (int w = 0; w < s.n_states(); ++w) got += p[w] * kappa.cost(s, s.u_R, w, m);
        rep.eq_r_residual[m] = got - best;
    }

    rep.eq_s_residual =
        sender_value_given_kappa(s, pi, family.lambda, kappa) - family.sender_value(s, kappa);
    rep.outcome = Outcome::from_family(s, family, kappa);
    return rep;
}

}  // namespace persuasion
