#include "persuasion/dynamic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

namespace persuasion {

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t rep, std::uint64_t channel) {
    // splitmix64 over a mixed key
    std::uint64_t z = root + 0x9E3779B97F4A7C15ull * (rep + 1) + 0xBF58476D1CE4E5B9ull * (channel + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::vector<double> cdf_of(const RatVec& row) {
    std::vector<double> cdf(row.size());
    double acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
        acc += to_double(row[i]);
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    return cdf;
}

void check_row_is_distribution(const RatVec& row, const char* what) {
    Rational sum = 0;
    for (const auto& v : row) {
        if (v < 0) throw std::logic_error(std::string(what) + ": negative probability");
        sum += v;
    }
    if (sum != 1) throw std::logic_error(std::string(what) + ": row does not sum to 1");
}

long lcm_long(long a, long b) {
    if (a == 0 || b == 0) return a | b;
    long g = std::gcd(a, b);
    long r = a / g;
    if (r > 2000000000L / b) throw std::invalid_argument("block length overflows");
    return r * b;
}

long denom_as_long(const Rational& r) {
    auto d = denominator(r);
    if (d > 2000000000) throw std::invalid_argument("denominator too large for block sizing");
    return d.convert_to<long>();
}

}  // namespace

BlockConfig BlockConfig::make(const std::vector<SubBlockSpec>& specs, long n_floor) {
    if (specs.empty()) throw std::invalid_argument("block config: no sub-blocks");
    Rational eta_sum = 0;
    for (const auto& sp : specs) {
        if (sp.eta < 0) throw std::invalid_argument("block config: negative sub-block weight");
        eta_sum += sp.eta;
    }
    if (eta_sum != 1) throw std::invalid_argument("block config: sub-block weights must sum to 1");

    long base = 1;
    for (const auto& sp : specs) {
        if (sp.eta == 0) continue;
        for (const auto& l : sp.family.lambda) base = lcm_long(base, denom_as_long(sp.eta * l));
    }
    long k = (n_floor + base - 1) / base;
    if (k < 1) k = 1;

    BlockConfig cfg;
    cfg.N = k * base;
    long pos = 0;
    for (const auto& sp : specs) {
        if (sp.eta == 0) continue;
        SubBlock sb;
        sb.eta = sp.eta;
        sb.family = sp.family;
        sb.kappa = sp.kappa;
        sb.start = pos;
        Rational len = sp.eta * cfg.N;
        sb.len = len.convert_to<long>();
        for (const auto& l : sp.family.lambda) {
            Rational q = sp.eta * l * cfg.N;
            if (denominator(q) != 1)
                throw std::logic_error("block config: non-integral quota");
            sb.quota.push_back(q.convert_to<long>());
        }
        pos += sb.len;
        cfg.subs.push_back(std::move(sb));
    }
    if (pos != cfg.N) throw std::logic_error("block config: sub-block lengths do not tile the block");
    return cfg;
}

int BlockConfig::sub_at(long pos) const {
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (pos >= subs[i].start && pos < subs[i].start + subs[i].len) return static_cast<int>(i);
    throw std::logic_error("block config: position outside block");
}

std::shared_ptr<const CanonicalTables> make_canonical_tables(const Scenario& s,
                                                             const ChainFacts& cf,
                                                             const BlockConfig& cfg) {
    if (!cf.is_pseudo_renewal)
        throw std::invalid_argument("canonical sender: chain must be pseudo-renewal");
    const int ns = s.n_states();
    const int nm = s.n_messages();
    auto t = std::make_shared<CanonicalTables>();
    t->cfg = cfg;

    for (const auto& sub : cfg.subs) {
        sub.family.check_plausible(cf.mu);
        const RatVec& lambda = sub.family.lambda;

        RatMat first(ns, RatVec(nm, 0));
        for (int w = 0; w < ns; ++w) {
            for (int m = 0; m < nm; ++m)
                if (lambda[m] > 0) first[w][m] = lambda[m] * sub.family.posteriors[m][w] / cf.mu[w];
            check_row_is_distribution(first[w], "canonical first-period row");
        }
        t->first.push_back(std::move(first));

        std::vector<RatMat> trans(nm, RatMat(ns, RatVec(nm, 0)));
        for (int prev = 0; prev < nm; ++prev) {
            if (lambda[prev] == 0) {
                for (int w = 0; w < ns; ++w) trans[prev][w] = lambda;  // off-path default
                continue;
            }
            RatVec q(ns);
            for (int w = 0; w < ns; ++w)
                q[w] = cf.alpha * sub.family.posteriors[prev][w] + (1 - cf.alpha) * cf.mu[w];
            for (int w = 0; w < ns; ++w) {
                if (q[w] == 0) {
                    trans[prev][w] = lambda;  // unreachable given prev
                    continue;
                }
                for (int m = 0; m < nm; ++m) {
                    if (lambda[m] == 0) continue;
                    Rational weight = (1 - cf.alpha) * lambda[m];
                    if (m == prev) weight += cf.alpha;
                    trans[prev][w][m] = sub.family.posteriors[m][w] / q[w] * weight;
                }
                check_row_is_distribution(trans[prev][w], "canonical transition row");
            }
        }
        t->trans.push_back(std::move(trans));
    }
    return t;
}

namespace {

class CanonicalSender final : public SenderStrategy {
  public:
    explicit CanonicalSender(std::shared_ptr<const CanonicalTables> t) : t_(std::move(t)) {
        const auto& cfg = t_->cfg;
        for (std::size_t i = 0; i < cfg.subs.size(); ++i) {
            const int ns = static_cast<int>(t_->first[i].size());
            const int nm = static_cast<int>(t_->first[i][0].size());
            std::vector<std::vector<double>> f(ns);
            for (int w = 0; w < ns; ++w) f[w] = cdf_of(t_->first[i][w]);
            first_cdf_.push_back(std::move(f));
            std::vector<std::vector<std::vector<double>>> tr(nm,
                std::vector<std::vector<double>>(ns));
            for (int prev = 0; prev < nm; ++prev)
                for (int w = 0; w < ns; ++w) tr[prev][w] = cdf_of(t_->trans[i][prev][w]);
            trans_cdf_.push_back(std::move(tr));
        }
        reset();
    }

    void reset() override {
        pos_ = 0;
        prev_ = -1;
    }

    int act(int state, RngStream& rng) override {
        const auto& cfg = t_->cfg;
        const int sub = cfg.sub_at(pos_);
        const bool fresh = (pos_ == cfg.subs[sub].start);
        int m = fresh ? rng.sample_cdf(first_cdf_[sub][state])
                      : rng.sample_cdf(trans_cdf_[sub][prev_][state]);
        prev_ = m;
        pos_ = (pos_ + 1) % cfg.N;
        return m;
    }

  private:
    std::shared_ptr<const CanonicalTables> t_;
    std::vector<std::vector<std::vector<double>>> first_cdf_;
    std::vector<std::vector<std::vector<std::vector<double>>>> trans_cdf_;
    long pos_ = 0;
    int prev_ = -1;
};

class QuotaReceiver final : public ReceiverStrategy {
  public:
    QuotaReceiver(BlockConfig cfg, int n_messages) : cfg_(std::move(cfg)), nm_(n_messages) {
        reset();
    }

    void reset() override {
        pos_ = 0;
        counts_.assign(nm_, 0);
        usage_.clear();
        block_usage_.assign(nm_, 0);
        replaced_ = false;
    }

    int act(int message, RngStream& rng) override {
        const int sub = cfg_.sub_at(pos_);
        const SubBlock& sb = cfg_.subs[sub];
        if (pos_ == sb.start) counts_.assign(nm_, 0);

        int used = message;
        replaced_ = false;
        if (counts_[message] >= sb.quota[message]) {
            replaced_ = true;
            long slack_total = 0;
            for (int m = 0; m < nm_; ++m) slack_total += sb.quota[m] - counts_[m];
            if (slack_total <= 0) throw std::logic_error("quota receiver: no slack left");
            double u = rng.uniform() * static_cast<double>(slack_total);
            long acc = 0;
            used = -1;
            for (int m = 0; m < nm_; ++m) {
                long slack = sb.quota[m] - counts_[m];
                if (slack <= 0) continue;
                acc += slack;
                if (u < static_cast<double>(acc)) {
                    used = m;
                    break;
                }
            }
            if (used < 0) {  // numerical edge of the uniform draw
                for (int m = nm_ - 1; m >= 0; --m)
                    if (sb.quota[m] - counts_[m] > 0) { used = m; break; }
            }
        }
        ++counts_[used];
        ++block_usage_[used];

        // exact quota fill is structural; verify at every sub-block end
        if (pos_ == sb.start + sb.len - 1)
            for (int m = 0; m < nm_; ++m)
                if (counts_[m] != sb.quota[m])
                    throw std::logic_error("quota receiver: counter/quota mismatch");

        if (pos_ == cfg_.N - 1) {
            usage_.push_back(block_usage_);
            block_usage_.assign(nm_, 0);
        }
        pos_ = (pos_ + 1) % cfg_.N;
        return cfg_.subs[sub].kappa.action.at(used);
    }

    bool last_replaced() const override { return replaced_; }
    const std::vector<std::vector<long>>* usage_history() const override { return &usage_; }

  private:
    BlockConfig cfg_;
    int nm_;
    long pos_ = 0;
    std::vector<long> counts_;
    std::vector<long> block_usage_;
    std::vector<std::vector<long>> usage_;
    bool replaced_ = false;
};

class GreedySender final : public SenderStrategy {
  public:
    GreedySender(const Scenario& s, const BlockConfig& cfg) : cfg_(cfg) {
        for (const auto& sub : cfg_.subs) {
            std::vector<int> row(s.n_states(), 0);
            for (int w = 0; w < s.n_states(); ++w) {
                int best_m = -1;
                Rational best_v = 0;
                for (int m = 0; m < s.n_messages(); ++m) {
                    if (sub.family.lambda[m] == 0) continue;
                    Rational v = s.u_S[w][sub.kappa.action.at(m)];
                    if (best_m < 0 || v > best_v) {
                        best_m = m;
                        best_v = v;
                    }
                }
                row[w] = best_m;
            }
            choice_.push_back(std::move(row));
        }
        reset();
    }

    void reset() override { pos_ = 0; }

    int act(int state, RngStream&) override {
        const int sub = cfg_.sub_at(pos_);
        pos_ = (pos_ + 1) % cfg_.N;
        return choice_[sub][state];
    }

  private:
    BlockConfig cfg_;
    std::vector<std::vector<int>> choice_;
    long pos_ = 0;
};

class MyopicReceiver final : public ReceiverStrategy {
  public:
    MyopicReceiver(const Scenario& s, const ChainFacts& cf,
                   std::shared_ptr<const CanonicalTables> t)
        : s_(s), cf_(cf), t_(std::move(t)) {
        reset();
    }

    void reset() override {
        pos_ = 0;
        prev_ = -1;
        prior_ = cf_.mu;
    }

    int act(int message, RngStream&) override {
        const auto& cfg = t_->cfg;
        const int sub = cfg.sub_at(pos_);
        const bool fresh = (pos_ == cfg.subs[sub].start);

        Key key{sub, fresh, fresh ? -1 : prev_, message, prior_};
        auto it = memo_.find(key);
        if (it == memo_.end()) {
            Step step;
            RatVec post(s_.n_states());
            Rational z = 0;
            for (int w = 0; w < s_.n_states(); ++w) {
                const Rational& lik =
                    fresh ? t_->first[sub][w][message] : t_->trans[sub][prev_][w][message];
                post[w] = prior_[w] * lik;
                z += post[w];
            }
            if (z == 0) throw std::logic_error("myopic receiver: off-path message");
            for (auto& v : post) v /= z;
            Belief posterior(post);
            step.action = best_responses(s_, posterior).first.front();
            step.next_prior = next_belief(cf_, posterior);
            it = memo_.emplace(std::move(key), std::move(step)).first;
        }
        prior_ = it->second.next_prior;
        prev_ = message;
        pos_ = (pos_ + 1) % cfg.N;
        return it->second.action;
    }

  private:
    struct Key {
        int sub;
        bool fresh;
        int prev;
        int msg;
        Belief prior;
        bool operator<(const Key& o) const {
            if (sub != o.sub) return sub < o.sub;
            if (fresh != o.fresh) return fresh < o.fresh;
            if (prev != o.prev) return prev < o.prev;
            if (msg != o.msg) return msg < o.msg;
            return prior < o.prior;
        }
    };
    struct Step {
        int action;
        Belief next_prior;
    };

    Scenario s_;
    ChainFacts cf_;
    std::shared_ptr<const CanonicalTables> t_;
    std::map<Key, Step> memo_;
    long pos_ = 0;
    int prev_ = -1;
    Belief prior_;
};

}  // namespace

std::unique_ptr<SenderStrategy> build_canonical_sender(
    std::shared_ptr<const CanonicalTables> tables) {
    return std::make_unique<CanonicalSender>(std::move(tables));
}

std::unique_ptr<ReceiverStrategy> build_quota_receiver(const BlockConfig& cfg, int n_messages) {
    return std::make_unique<QuotaReceiver>(cfg, n_messages);
}

std::unique_ptr<SenderStrategy> build_greedy_sender(const Scenario& s, const BlockConfig& cfg) {
    return std::make_unique<GreedySender>(s, cfg);
}

std::unique_ptr<ReceiverStrategy> build_myopic_receiver(
    const Scenario& s, const ChainFacts& cf, std::shared_ptr<const CanonicalTables> tables) {
    return std::make_unique<MyopicReceiver>(s, cf, std::move(tables));
}

ProfileSpec canonical_profile(const Scenario& s, const ChainFacts& cf, const BlockConfig& cfg) {
    auto tables = make_canonical_tables(s, cf, cfg);
    ProfileSpec p;
    p.name = "canonical";
    p.freq_window_hint = cfg.N;
    p.make_sender = [tables]() { return build_canonical_sender(tables); };
    const int nm = s.n_messages();
    p.make_receiver = [cfg, nm]() { return build_quota_receiver(cfg, nm); };
    return p;
}

// ---------------------------------------------------------------------------
// scripted profiles

namespace {

struct ScriptTables {
    // parity: 0 = odd periods, 1 = even. prev index 0 means "none".
    std::vector<std::vector<std::vector<int>>> sender;    // [parity][state][prev+1] -> message
    std::vector<std::vector<std::vector<int>>> receiver;  // [parity][prev+1][message] -> action
    bool trigger_even_mismatch = false;
    int trigger_action = -1;
};

int parity_of(const std::string& s) {
    if (s == "odd") return 0;
    if (s == "even") return 1;
    if (s == "*") return -1;
    throw std::invalid_argument("script: parity must be odd, even or *");
}

std::shared_ptr<const ScriptTables> compile_script(const Scenario& s, const nlohmann::json& j) {
    const int ns = s.n_states();
    const int nm = s.n_messages();
    auto t = std::make_shared<ScriptTables>();
    t->sender.assign(2, std::vector<std::vector<int>>(ns, std::vector<int>(nm + 1, -1)));
    t->receiver.assign(2, std::vector<std::vector<int>>(nm + 1, std::vector<int>(nm, -1)));

    if (!j.contains("sender") || !j.at("sender").is_array())
        throw std::invalid_argument("script: missing sender rule array");
    for (const auto& rule : j.at("sender")) {
        int par = parity_of(rule.at("parity").get<std::string>());
        std::string st = rule.at("state").get<std::string>();
        std::string pv = rule.at("prev").get<std::string>();
        int msg = s.message_index(rule.at("send").get<std::string>());
        for (int p = 0; p < 2; ++p) {
            if (par >= 0 && p != par) continue;
            for (int w = 0; w < ns; ++w) {
                if (st != "*" && w != s.state_index(st)) continue;
                for (int prev = 0; prev <= nm; ++prev) {
                    if (pv != "*" && !(prev > 0 && prev - 1 == s.message_index(pv))) continue;
                    if (t->sender[p][w][prev] < 0) t->sender[p][w][prev] = msg;  // first match wins
                }
            }
        }
    }

    if (!j.contains("receiver") || !j.at("receiver").is_object())
        throw std::invalid_argument("script: missing receiver table");
    const auto& recv = j.at("receiver");
    if (recv.contains("trigger")) {
        const auto& trig = recv.at("trigger");
        if (trig.at("when").get<std::string>() != "even_mismatch")
            throw std::invalid_argument("script: unknown trigger condition");
        t->trigger_even_mismatch = true;
        t->trigger_action = s.action_index(trig.at("play").get<std::string>());
    }
    if (!recv.contains("rules") || !recv.at("rules").is_array())
        throw std::invalid_argument("script: missing receiver rule array");
    for (const auto& rule : recv.at("rules")) {
        int par = parity_of(rule.at("parity").get<std::string>());
        std::string pv = rule.at("prev").get<std::string>();
        int msg = s.message_index(rule.at("message").get<std::string>());
        int act = s.action_index(rule.at("play").get<std::string>());
        for (int p = 0; p < 2; ++p) {
            if (par >= 0 && p != par) continue;
            for (int prev = 0; prev <= nm; ++prev) {
                if (pv != "*" && !(prev > 0 && prev - 1 == s.message_index(pv))) continue;
                if (t->receiver[p][prev][msg] < 0) t->receiver[p][prev][msg] = act;
            }
        }
    }

    // totality over reachable keys: period 1 is odd with no previous message;
    // even periods always have one
    for (int w = 0; w < ns; ++w) {
        for (int prev = 0; prev <= nm; ++prev) {
            if (t->sender[0][w][prev] < 0)
                throw std::invalid_argument("script: sender rule missing for odd period, state " +
                                            s.states[w]);
            if (prev > 0 && t->sender[1][w][prev] < 0)
                throw std::invalid_argument("script: sender rule missing for even period, state " +
                                            s.states[w]);
        }
    }
    for (int prev = 0; prev <= nm; ++prev) {
        for (int m = 0; m < nm; ++m) {
            if (t->receiver[0][prev][m] < 0)
                throw std::invalid_argument("script: receiver rule missing for odd period, message " +
                                            s.messages[m]);
            bool covered_by_trigger =
                t->trigger_even_mismatch && prev > 0 && (prev - 1) != m;
            if (prev > 0 && !covered_by_trigger && t->receiver[1][prev][m] < 0)
                throw std::invalid_argument("script: receiver rule missing for even period, message " +
                                            s.messages[m]);
        }
    }
    return t;
}

class ScriptedSender final : public SenderStrategy {
  public:
    explicit ScriptedSender(std::shared_ptr<const ScriptTables> t) : t_(std::move(t)) { reset(); }
    void reset() override {
        n_ = 0;
        prev_ = -1;
    }
    int act(int state, RngStream&) override {
        int parity = static_cast<int>(n_ % 2);  // 0: odd period (1-based)
        int m = t_->sender[parity][state][prev_ + 1];
        prev_ = m;
        ++n_;
        return m;
    }

  private:
    std::shared_ptr<const ScriptTables> t_;
    long n_ = 0;
    int prev_ = -1;
};

class ScriptedReceiver final : public ReceiverStrategy {
  public:
    explicit ScriptedReceiver(std::shared_ptr<const ScriptTables> t) : t_(std::move(t)) { reset(); }
    void reset() override {
        n_ = 0;
        prev_ = -1;
        triggered_ = false;
    }
    int act(int message, RngStream&) override {
        int parity = static_cast<int>(n_ % 2);
        ++n_;
        if (!triggered_ && t_->trigger_even_mismatch && parity == 1 && message != prev_)
            triggered_ = true;
        if (triggered_) {
            prev_ = message;
            return t_->trigger_action;
        }
        int a = t_->receiver[parity][prev_ + 1][message];
        prev_ = message;
        return a;
    }

  private:
    std::shared_ptr<const ScriptTables> t_;
    long n_ = 0;
    int prev_ = -1;
    bool triggered_ = false;
};

class EvenFlipSender final : public SenderStrategy {
  public:
    EvenFlipSender(std::shared_ptr<const ScriptTables> t, int n_messages)
        : t_(std::move(t)), nm_(n_messages) {
        if (nm_ != 2) throw std::invalid_argument("even-flip deviation needs binary messages");
        reset();
    }
    void reset() override {
        n_ = 0;
        prev_ = -1;
    }
    int act(int state, RngStream&) override {
        int parity = static_cast<int>(n_ % 2);
        int m = t_->sender[parity][state][prev_ + 1];
        if (parity == 1) m = 1 - m;
        prev_ = m;
        ++n_;
        return m;
    }

  private:
    std::shared_ptr<const ScriptTables> t_;
    int nm_;
    long n_ = 0;
    int prev_ = -1;
};

const char* kExample2Script = R"json({
  "sender": [
    {"parity": "odd",  "state": "w1", "prev": "*", "send": "l"},
    {"parity": "odd",  "state": "w2", "prev": "*", "send": "h"},
    {"parity": "even", "state": "*",  "prev": "l", "send": "l"},
    {"parity": "even", "state": "*",  "prev": "h", "send": "h"}
  ],
  "receiver": {
    "rules": [
      {"parity": "odd",  "prev": "*", "message": "l", "play": "a1"},
      {"parity": "odd",  "prev": "*", "message": "h", "play": "a4"},
      {"parity": "even", "prev": "l", "message": "l", "play": "a2"},
      {"parity": "even", "prev": "h", "message": "h", "play": "a3"}
    ],
    "trigger": {"when": "even_mismatch", "play": "a1"}
  }
})json";

}  // namespace

ProfileSpec scripted_profile_from_json(const Scenario& s, const nlohmann::json& script,
                                       bool flip_even_sender) {
    auto tables = compile_script(s, script);
    ProfileSpec p;
    p.script_json = std::make_shared<const std::string>(script.dump());
    p.name = flip_even_sender ? "scripted+even_flip" : "scripted";
    const int nm = s.n_messages();
    if (flip_even_sender)
        p.make_sender = [tables, nm]() { return std::make_unique<EvenFlipSender>(tables, nm); };
    else
        p.make_sender = [tables]() { return std::make_unique<ScriptedSender>(tables); };
    p.make_receiver = [tables]() { return std::make_unique<ScriptedReceiver>(tables); };
    return p;
}

ProfileSpec scripted_profile(const Scenario& s, const std::string& name, bool flip_even_sender) {
    if (name != "example2")
        throw std::invalid_argument("unknown bundled script: " + name);
    auto p = scripted_profile_from_json(s, nlohmann::json::parse(kExample2Script),
                                        flip_even_sender);
    p.name = "scripted:example2" + std::string(flip_even_sender ? "+even_flip" : "");
    return p;
}

// ---------------------------------------------------------------------------
// simulation

int worker_count() {
    if (const char* env = std::getenv("PERSUASION_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return std::min(v, 64);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

SimReport simulate(const Scenario& s, const ChainFacts& cf, const ProfileSpec& profile,
                   const SimParams& params) {
    if (params.reps < 1) throw std::invalid_argument("simulate: need reps >= 1");
    if (params.horizon < 1) throw std::invalid_argument("simulate: need horizon >= 1");
    if (!(params.delta > 0 && params.delta < 1))
        throw std::invalid_argument("simulate: delta must lie in (0,1)");

    const double umax = to_double(s.max_abs_payoff());
    const double tail = umax * std::pow(params.delta, static_cast<double>(params.horizon));
    if (tail > params.tail_tol) {
        long needed = static_cast<long>(std::ceil(std::log(params.tail_tol / std::max(umax, 1e-300)) /
                                                  std::log(params.delta)));
        throw std::invalid_argument(
            "simulate: horizon " + std::to_string(params.horizon) +
            " leaves discounted tail bound " + std::to_string(tail) + " > tolerance " +
            std::to_string(params.tail_tol) + "; need horizon >= " + std::to_string(needed));
    }

    const int ns = s.n_states();
    const int nm = s.n_messages();
    const int na = s.n_actions();
    const long H = params.horizon;
    const long W = params.freq_window > 0 ? std::min(params.freq_window, H)
                                          : std::min(profile.freq_window_hint, H);

    std::vector<std::vector<double>> mu_cdf_row(1);
    mu_cdf_row[0] = cdf_of(cf.mu.p);
    std::vector<std::vector<double>> q_cdf(ns);
    for (int w = 0; w < ns; ++w) q_cdf[w] = cdf_of(s.Q[w]);
    std::vector<std::vector<double>> us(ns, std::vector<double>(na)), ur(ns, std::vector<double>(na));
    for (int w = 0; w < ns; ++w)
        for (int a = 0; a < na; ++a) {
            us[w][a] = to_double(s.u_S[w][a]);
            ur[w][a] = to_double(s.u_R[w][a]);
        }

    SimReport rep;
    rep.delta = params.delta;
    rep.horizon = H;
    rep.reps = params.reps;
    rep.seed = params.seed;
    rep.tail_bound = tail;
    rep.profile_name = profile.name;
    rep.freq_window = W;
    rep.rep_sender_disc.assign(params.reps, 0.0);
    rep.rep_receiver_disc.assign(params.reps, 0.0);
    rep.rep_sender_avg.assign(params.reps, 0.0);
    rep.rep_receiver_avg.assign(params.reps, 0.0);

    struct Buffers {
        std::vector<std::uint64_t> freq;     // W*ns*nm
        std::vector<std::uint64_t> outcome;  // H*ns*na
        std::uint64_t replaced = 0;
        std::vector<std::vector<long>> first_usage;
    };
    const int nthreads = std::max(1, std::min(worker_count(), params.reps));
    std::vector<Buffers> buffers(nthreads);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);

    auto work = [&](int tid, int rep_lo, int rep_hi) {
        try {
            Buffers& buf = buffers[tid];
            buf.freq.assign(static_cast<std::size_t>(W) * ns * nm, 0);
            buf.outcome.assign(static_cast<std::size_t>(H) * ns * na, 0);
            for (int r = rep_lo; r < rep_hi; ++r) {
                RngStream chain_rng(derive_seed(params.seed, r, 0));
                RngStream sender_rng(derive_seed(params.seed, r, 1));
                RngStream receiver_rng(derive_seed(params.seed, r, 2));
                auto sender = profile.make_sender();
                auto receiver = profile.make_receiver();
                sender->seed_aux(derive_seed(params.seed, r, 3));
                sender->reset();
                receiver->reset();

                int state = chain_rng.sample_cdf(mu_cdf_row[0]);
                double w = 1.0, dsum_s = 0, dsum_r = 0, asum_s = 0, asum_r = 0;
                for (long n = 0; n < H; ++n) {
                    int m = sender->act(state, sender_rng);
                    int a = receiver->act(m, receiver_rng);
                    if (receiver->last_replaced()) ++buf.replaced;
                    if (n < W) ++buf.freq[(static_cast<std::size_t>(n) * ns + state) * nm + m];
                    ++buf.outcome[(static_cast<std::size_t>(n) * ns + state) * na + a];
                    dsum_s += w * us[state][a];
                    dsum_r += w * ur[state][a];
                    asum_s += us[state][a];
                    asum_r += ur[state][a];
                    w *= params.delta;
                    state = chain_rng.sample_cdf(q_cdf[state]);
                }
                rep.rep_sender_disc[r] = (1 - params.delta) * dsum_s;
                rep.rep_receiver_disc[r] = (1 - params.delta) * dsum_r;
                rep.rep_sender_avg[r] = asum_s / static_cast<double>(H);
                rep.rep_receiver_avg[r] = asum_r / static_cast<double>(H);
                if (r == 0 && receiver->usage_history())
                    buf.first_usage = *receiver->usage_history();
            }
        } catch (...) {
            errors[tid] = std::current_exception();
        }
    };

    const int per = (params.reps + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
        int lo = t * per, hi = std::min(params.reps, (t + 1) * per);
        if (lo >= hi) break;
        pool.emplace_back(work, t, lo, hi);
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::uint64_t> freq_counts(static_cast<std::size_t>(W) * ns * nm, 0);
    std::vector<std::uint64_t> outcome_counts(static_cast<std::size_t>(H) * ns * na, 0);
    std::uint64_t replaced = 0;
    for (const auto& buf : buffers) {
        if (buf.freq.empty()) continue;
        for (std::size_t i = 0; i < freq_counts.size(); ++i) freq_counts[i] += buf.freq[i];
        for (std::size_t i = 0; i < outcome_counts.size(); ++i) outcome_counts[i] += buf.outcome[i];
        replaced += buf.replaced;
        if (!buf.first_usage.empty() && rep.first_rep_usage.empty())
            rep.first_rep_usage = buf.first_usage;
    }
    rep.replacement_fraction =
        static_cast<double>(replaced) / (static_cast<double>(params.reps) * H);

    rep.freq.assign(W, std::vector<std::vector<double>>(ns, std::vector<double>(nm, 0.0)));
    for (long n = 0; n < W; ++n)
        for (int w = 0; w < ns; ++w)
            for (int m = 0; m < nm; ++m)
                rep.freq[n][w][m] =
                    static_cast<double>(freq_counts[(static_cast<std::size_t>(n) * ns + w) * nm + m]) /
                    params.reps;

    rep.outcome_weights.assign(ns, std::vector<double>(na, 0.0));
    double total_w = 0;
    {
        double w = 1.0;
        for (long n = 0; n < H; ++n) {
            for (int st = 0; st < ns; ++st)
                for (int a = 0; a < na; ++a)
                    rep.outcome_weights[st][a] +=
                        w * static_cast<double>(
                                outcome_counts[(static_cast<std::size_t>(n) * ns + st) * na + a]);
            total_w += w * params.reps;
            w *= params.delta;
        }
    }
    for (int st = 0; st < ns; ++st)
        for (int a = 0; a < na; ++a) rep.outcome_weights[st][a] /= total_w;

    auto mean_se = [&](const std::vector<double>& xs, double& mean, double& se) {
        double m = 0;
        for (double x : xs) m += x;
        m /= xs.size();
        double v = 0;
        for (double x : xs) v += (x - m) * (x - m);
        se = xs.size() > 1 ? std::sqrt(v / (xs.size() - 1.0) / xs.size()) : 0.0;
        mean = m;
    };
    mean_se(rep.rep_sender_disc, rep.sender_disc_mean, rep.sender_disc_se);
    mean_se(rep.rep_receiver_disc, rep.receiver_disc_mean, rep.receiver_disc_se);
    mean_se(rep.rep_sender_avg, rep.sender_avg_mean, rep.sender_avg_se);
    mean_se(rep.rep_receiver_avg, rep.receiver_avg_mean, rep.receiver_avg_se);
    return rep;
}

Outcome outcome_from_sim(const SimReport& report, const Scenario& s) {
    if (report.outcome_weights.empty())
        throw std::invalid_argument("outcome_from_sim: report carries no outcome weights");
    Outcome out;
    out.nu.assign(s.n_states(), RatVec(s.n_actions(), 0));
    Rational total = 0;
    for (int w = 0; w < s.n_states(); ++w)
        for (int a = 0; a < s.n_actions(); ++a) {
            out.nu[w][a] = Rational(report.outcome_weights[w][a]);  // dyadic, exact
            total += out.nu[w][a];
        }
    if (total == 0) throw std::logic_error("outcome_from_sim: empty outcome");
    for (auto& row : out.nu)
        for (auto& v : row) v /= total;
    out.check(s);
    return out;
}

}  // namespace persuasion
