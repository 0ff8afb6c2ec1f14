#pragma once

#include "persuasion/envelopes.hpp"
#include "persuasion/lp.hpp"
#include "persuasion/scenario.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace persuasion {

// Weighted family of posteriors with message marginal lambda. Posterior
// entries for messages with lambda(m) = 0 are ignored.
struct PosteriorFamily {
    RatVec lambda;
    std::vector<Belief> posteriors;

    // throws unless lambda is a distribution and sum lambda(m) p_m == pi
    void check_plausible(const Belief& pi) const;
    Rational sender_value(const Scenario& s, const struct ResponseRule& kappa) const;
    Rational receiver_value(const Scenario& s, const struct ResponseRule& kappa) const;
};

// Pure response rule; an optional mixed form is accepted by verification
// calls only.
struct ResponseRule {
    std::vector<int> action;          // message -> action
    std::optional<RatMat> mixed;      // message -> distribution over actions

    // expected sender/receiver payoff coefficient of (state, message)
    Rational cost(const Scenario& s, const RatMat& u, int state, int msg) const;
    std::string describe(const Scenario& s, const RatVec& lambda) const;
};

struct EquilibriumRecord {
    RatVec lambda;
    ResponseRule kappa;
    Rational sender_value;
    std::pair<Rational, Rational> receiver_range;
    PosteriorFamily witness;
};

// Joint distribution over states x actions.
struct Outcome {
    RatMat nu;

    void check(const Scenario& s) const;                    // mass 1, entries >= 0
    RatVec state_marginal() const;
    Rational expected(const RatMat& u) const;
    static Outcome from_family(const Scenario& s, const PosteriorFamily& f,
                               const ResponseRule& kappa);
};

// Best sender payoff over all lambda-preserving posterior deviations, given
// the receiver plays kappa: a transportation LP with row sums pi, column
// sums lambda. This value is the sender payoff in any equilibrium supported
// by kappa.
Rational sender_value_given_kappa(const Scenario& s, const Belief& pi, const RatVec& lambda,
                                  const ResponseRule& kappa);

// Same objective restricted by the receiver's obedience polytope. An
// equilibrium with rule kappa exists iff the restricted optimum equals the
// unrestricted one; in that case the witness is an optimal vertex and the
// receiver range spans the argmax face intersected with obedience.
std::optional<EquilibriumRecord> equilibrium_for_kappa(const Scenario& s, const Belief& pi,
                                                       const RatVec& lambda,
                                                       const ResponseRule& kappa);

// All pure response rules on supp(lambda), with the babbling record
// guaranteed present (all posteriors = pi, constant sender-preferred rule).
std::vector<EquilibriumRecord> enumerate_equilibria(const Scenario& s, const Belief& pi,
                                                    const RatVec& lambda,
                                                    long kappa_cap = 1000000);

Rational sender_optimal(const Scenario& s, const Belief& pi, const RatVec& lambda);

struct SweepPoint {
    RatVec lambda;
    Rational best_sender;
    std::pair<Rational, Rational> receiver_range;
    ResponseRule kappa;
};

// Binary-message grid lambda = (k/D, 1-k/D), k = 0..D.
std::vector<SweepPoint> lambda_sweep(const Scenario& s, const Belief& pi, long D);
std::vector<SweepPoint> lambda_sweep(const Scenario& s, const Belief& pi,
                                     const std::vector<RatVec>& lambdas);

// Hull of equilibrium payoff pairs (sender, receiver endpoint) across the
// lambda grid.
std::vector<Point2> payoff_hull(const Scenario& s, const Belief& pi, long D);

// Hull of (lambda(m1), best sender value) pairs from a binary-message sweep;
// its upper chain is the concavification of the sweep curve.
std::vector<Point2> sweep_value_hull(const std::vector<SweepPoint>& sweep);

struct VerifyReport {
    RatVec eq_r_residual;   // per message: kappa value minus best-response value (<= 0)
    Rational eq_s_residual; // deviation optimum minus family value (>= 0)
    Outcome outcome;
};

// Residuals of both equilibrium conditions for a given family and rule
// (mixed rules accepted here).
VerifyReport verify_family(const Scenario& s, const Belief& pi, const PosteriorFamily& family,
                           const ResponseRule& kappa);

}  // namespace persuasion
