#pragma once

#include "persuasion/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace persuasion {

struct Belief {
    RatVec p;

    Belief() = default;
    explicit Belief(RatVec probs);  // validates: entries >= 0, sum exactly 1

    int size() const { return static_cast<int>(p.size()); }
    const Rational& operator[](int i) const { return p[i]; }
    bool operator==(const Belief& o) const { return p == o.p; }
    bool operator<(const Belief& o) const { return p < o.p; }

    // binary-state shorthand: probability of the second state
    static Belief binary(const Rational& p2) { return Belief({1 - p2, p2}); }
    const Rational& second() const;
};

struct Scenario {
    std::vector<std::string> states;
    std::vector<std::string> messages;
    std::vector<std::string> actions;
    RatMat u_S;  // states x actions
    RatMat u_R;  // states x actions
    RatMat Q;    // states x states, row-stochastic
    std::optional<Belief> prior_override;

    int n_states() const { return static_cast<int>(states.size()); }
    int n_messages() const { return static_cast<int>(messages.size()); }
    int n_actions() const { return static_cast<int>(actions.size()); }

    int state_index(const std::string& label) const;
    int message_index(const std::string& label) const;
    int action_index(const std::string& label) const;

    Rational max_abs_payoff() const;
};

struct ChainFacts {
    Belief mu;       // invariant distribution
    RatVec beta;     // off-diagonal destination rates
    Rational B;      // sum of beta
    Rational alpha;  // 1 - B
    bool is_pseudo_renewal = false;
    bool is_irreducible = false;
    bool is_aperiodic = false;
    RatMat Q;        // copy for belief updates
};

// Structural and chain validation. Throws std::invalid_argument with a
// distinct diagnostic per failure (label clashes, |M| too small,
// non-stochastic Q, reducible or periodic chain).
ChainFacts validate_scenario(const Scenario& s);

// All receiver-optimal actions at belief p, plus the common optimal value.
std::pair<std::vector<int>, Rational> best_responses(const Scenario& s, const Belief& p);

// Sender's expected payoff at p under the sender-preferred best response.
Rational indirect_utility(const Scenario& s, const Belief& p);

// Belief thresholds (as P(second state)) where the best-response set
// changes. Binary-state scenarios only.
std::vector<Rational> br_breakpoints(const Scenario& s);

// One-step belief update p -> pQ. For pseudo-renewal chains the result is
// checked against alpha p + (1-alpha) mu.
Belief next_belief(const ChainFacts& cf, const Belief& p);

// Prior used by the static modules: override if present, else mu.
Belief static_prior(const Scenario& s, const ChainFacts& cf);

// Scenario JSON: keys states/messages/actions (string arrays), u_S/u_R/Q
// (arrays of arrays of integers or "p/q" strings), optional prior.
// Rejections carry the offending path.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

}  // namespace persuasion
