#pragma once

#include "persuasion/static_pc.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace persuasion {

// Deterministic per-purpose random stream; strategies and the chain never
// share a stream, so paired runs can reuse the chain draws.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    int sample_cdf(const std::vector<double>& cdf) {
        double u = uniform();
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
            if (u < cdf[i]) return static_cast<int>(i);
        return static_cast<int>(cdf.size()) - 1;
    }

  private:
    std::mt19937_64 gen_;
};

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t rep, std::uint64_t channel);

struct SubBlockSpec {
    Rational eta;
    PosteriorFamily family;
    ResponseRule kappa;
};

struct SubBlock {
    Rational eta;
    PosteriorFamily family;
    ResponseRule kappa;
    long start = 0;  // offset within the block
    long len = 0;
    std::vector<long> quota;  // per message, sums to len
};

struct BlockConfig {
    long N = 0;
    std::vector<SubBlock> subs;

    // Smallest N that makes every N eta_i lambda_i(m) an integer, scaled up
    // to at least n_floor.
    static BlockConfig make(const std::vector<SubBlockSpec>& specs, long n_floor);
    int sub_at(long pos_in_block) const;
};

class SenderStrategy {
  public:
    virtual ~SenderStrategy() = default;
    virtual void reset() = 0;
    virtual int act(int state, RngStream& rng) = 0;
    // Extra per-replication stream for wrapped deviations (coupling draws
    // must not disturb the base strategy's stream).
    virtual void seed_aux(std::uint64_t) {}
};

class ReceiverStrategy {
  public:
    virtual ~ReceiverStrategy() = default;
    virtual void reset() = 0;
    virtual int act(int message, RngStream& rng) = 0;
    virtual bool last_replaced() const { return false; }
    virtual const std::vector<std::vector<long>>* usage_history() const { return nullptr; }
};

// One-period message rows of the canonical block sender, exact. Rows are
// validated to sum to 1 before any sampling.
struct CanonicalTables {
    BlockConfig cfg;
    std::vector<RatMat> first;                // [sub][state][message]
    std::vector<std::vector<RatMat>> trans;   // [sub][prev][state][message]
};
std::shared_ptr<const CanonicalTables> make_canonical_tables(const Scenario& s,
                                                             const ChainFacts& cf,
                                                             const BlockConfig& cfg);

std::unique_ptr<SenderStrategy> build_canonical_sender(
    std::shared_ptr<const CanonicalTables> tables);
std::unique_ptr<ReceiverStrategy> build_quota_receiver(const BlockConfig& cfg, int n_messages);

// Stage-payoff-maximizing sender: each period sends the message whose
// response-rule action is best for the current state, ignoring quotas.
std::unique_ptr<SenderStrategy> build_greedy_sender(const Scenario& s, const BlockConfig& cfg);

// Best response to the exactly tracked posterior in every period. The
// tracker runs the Bayes recursion against the canonical sender's rows.
std::unique_ptr<ReceiverStrategy> build_myopic_receiver(
    const Scenario& s, const ChainFacts& cf, std::shared_ptr<const CanonicalTables> tables);

struct ProfileSpec {
    std::string name;
    std::function<std::unique_ptr<SenderStrategy>()> make_sender;
    std::function<std::unique_ptr<ReceiverStrategy>()> make_receiver;
    long freq_window_hint = 16;
    std::shared_ptr<const std::string> script_json;  // set for scripted profiles
};

ProfileSpec canonical_profile(const Scenario& s, const ChainFacts& cf, const BlockConfig& cfg);

// Deterministic finite-state scripted play. Scripts are JSON tables keyed
// by (parity, state, previous own message) for the sender and (parity,
// previous message, current message) for the receiver, with an optional
// trigger clause ("even_mismatch") that locks the receiver on one action.
// flip_even_sender swaps in the deviation that flips the emitted message in
// even periods (binary message sets).
ProfileSpec scripted_profile_from_json(const Scenario& s, const nlohmann::json& script,
                                       bool flip_even_sender = false);
ProfileSpec scripted_profile(const Scenario& s, const std::string& name,
                             bool flip_even_sender = false);  // bundled: "example2"

struct SimParams {
    double delta = 0.999;
    long horizon = 10000;
    int reps = 2000;
    std::uint64_t seed = 1;
    double tail_tol = 0.01;  // required bound on max|u| * delta^horizon
    long freq_window = 0;    // 0: use the profile hint
};

struct SimReport {
    double sender_disc_mean = 0, sender_disc_se = 0;
    double receiver_disc_mean = 0, receiver_disc_se = 0;
    double sender_avg_mean = 0, sender_avg_se = 0;  // un-discounted horizon average
    double receiver_avg_mean = 0, receiver_avg_se = 0;
    std::vector<double> rep_sender_disc, rep_receiver_disc;
    std::vector<double> rep_sender_avg, rep_receiver_avg;

    long freq_window = 0;
    std::vector<std::vector<std::vector<double>>> freq;  // [period][state][message]
    std::vector<std::vector<double>> outcome_weights;    // [state][action], mass 1

    bool quotas_exact = true;
    double replacement_fraction = 0;
    std::vector<std::vector<long>> first_rep_usage;  // per block, per message

    double delta = 0;
    long horizon = 0;
    int reps = 0;
    std::uint64_t seed = 0;
    double tail_bound = 0;
    std::string profile_name;
};

// Monte Carlo evaluation of a profile: draws omega_1 from mu, runs the chain
// and both strategies, accumulates (1-delta) sum delta^(n-1) u. Deterministic
// for a fixed seed, independent of worker count.
SimReport simulate(const Scenario& s, const ChainFacts& cf, const ProfileSpec& profile,
                   const SimParams& params);

// Discount-weighted empirical joint distribution over states and actions.
Outcome outcome_from_sim(const SimReport& report, const Scenario& s);

int worker_count();  // PERSUASION_LAB_THREADS override, else hardware default

}  // namespace persuasion
