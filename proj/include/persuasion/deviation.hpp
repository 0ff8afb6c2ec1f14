#pragma once

#include "persuasion/dynamic.hpp"

#include <optional>
#include <string>

namespace persuasion {

// Joint distribution over state pairs with equal marginals pi; conditionals
// c(w | w') are defined wherever pi(w') > 0.
struct Copula {
    RatMat c;

    void check(const Belief& pi) const;
    static Copula identity(const Belief& pi);
    static Copula swap(const Belief& pi);         // binary states
    static Copula independent(const Belief& pi);  // product pi x pi
};

struct ObedienceReport {
    Rational max_violation;  // 0 means obedient
    struct Row {
        int taken;
        int alt;
        Rational slack;  // negative = violated
    };
    std::vector<Row> table;
};

// Obedience slack for every ordered action pair under outcome nu.
ObedienceReport obedience_residuals(const Scenario& s, const Outcome& nu);

struct DeviationReport {
    std::string deviation;
    bool exact = false;
    // exact entries (rational LP results)
    Rational baseline_q, best_q, gain_q;
    // Monte Carlo entries
    double baseline = 0, best = 0, gain = 0, stderr_ = 0;
    double baseline_avg = 0, best_avg = 0, gain_avg = 0, stderr_avg = 0;
    std::string witness;
};

// Best payoff over all copula reweightings of nu: an LP over the copula
// polytope with marginals pi. Gain 0 certifies robustness.
DeviationReport copula_robustness(const Scenario& s, const Outcome& nu, const Belief& pi);

// Best lambda-preserving posterior deviation given kappa; gain 0 certifies
// the sender equilibrium condition.
DeviationReport marginal_preserving_deviation(const Scenario& s, const Belief& pi,
                                              const PosteriorFamily& family,
                                              const ResponseRule& kappa);

// Online fictitious-state coupling for pseudo-renewal chains. Feeding the
// true state path in, it emits a companion path with the same law whose
// per-period joint with the true path follows the copula. Uses only
// current-period information: a renewal indicator is forced when the state
// changes and sampled from its posterior odds otherwise.
class FictitiousStateStream {
  public:
    FictitiousStateStream(const ChainFacts& cf, const Copula& c);
    void reset();
    int step(int true_state, RngStream& rng);

  private:
    std::vector<double> renew_prob_;                // posterior renewal prob per held state
    std::vector<std::vector<double>> cond_cdf_;     // xi | true state
    int prev_true_ = -1;
    int prev_xi_ = -1;
};

// Wraps a sender strategy to act on the fictitious path instead of the true
// one; message law is unchanged, payoffs shift through the copula.
std::unique_ptr<SenderStrategy> copula_deviation_strategy(
    std::unique_ptr<SenderStrategy> base, const ChainFacts& cf, const Copula& c);
ProfileSpec with_copula_sender(const Scenario& s, const ChainFacts& cf, const ProfileSpec& base,
                               const Copula& c);

// Named deviation families for paired simulation.
struct DeviationSpec {
    enum class Kind { copula, greedy_sender, myopic_receiver, even_flip } kind;
    std::optional<Copula> copula;
    static DeviationSpec parse(const Scenario& s, const ChainFacts& cf, const std::string& name);
    std::string name() const;
};

// Common-random-number paired simulation of a baseline profile against one
// named deviation. For canonical profiles the block config must be supplied
// (greedy and myopic deviations are built from it).
DeviationReport epsilon_gain(const Scenario& s, const ChainFacts& cf, const ProfileSpec& baseline,
                             const DeviationSpec& dev, const SimParams& params,
                             const BlockConfig* cfg = nullptr);

}  // namespace persuasion
