#include "persuasion/deviation.hpp"

#include "persuasion/lp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace persuasion {

void Copula::check(const Belief& pi) const {
    const int n = pi.size();
    if (static_cast<int>(c.size()) != n)
        throw std::invalid_argument("copula: wrong number of rows");
    RatVec row_sum(n, 0), col_sum(n, 0);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(c[i].size()) != n)
            throw std::invalid_argument("copula: wrong number of columns");
        for (int j = 0; j < n; ++j) {
            if (c[i][j] < 0) throw std::invalid_argument("copula: negative entry");
            row_sum[i] += c[i][j];
            col_sum[j] += c[i][j];
        }
    }
    for (int i = 0; i < n; ++i)
        if (row_sum[i] != pi[i] || col_sum[i] != pi[i])
            throw std::invalid_argument("copula: marginals differ from pi");
}

Copula Copula::identity(const Belief& pi) {
    Copula cp;
    cp.c.assign(pi.size(), RatVec(pi.size(), 0));
    for (int i = 0; i < pi.size(); ++i) cp.c[i][i] = pi[i];
    return cp;
}

Copula Copula::swap(const Belief& pi) {
    if (pi.size() != 2) throw std::invalid_argument("swap copula: binary states only");
    if (pi[0] != pi[1])
        throw std::invalid_argument("swap copula: needs the uniform prior to keep marginals");
    Copula cp;
    cp.c.assign(2, RatVec(2, 0));
    cp.c[0][1] = pi[0];
    cp.c[1][0] = pi[1];
    return cp;
}

Copula Copula::independent(const Belief& pi) {
    Copula cp;
    cp.c.assign(pi.size(), RatVec(pi.size(), 0));
    for (int i = 0; i < pi.size(); ++i)
        for (int j = 0; j < pi.size(); ++j) cp.c[i][j] = pi[i] * pi[j];
    return cp;
}

ObedienceReport obedience_residuals(const Scenario& s, const Outcome& nu) {
    nu.check(s);
    ObedienceReport rep;
    rep.max_violation = 0;
    for (int a = 0; a < s.n_actions(); ++a) {
        for (int b = 0; b < s.n_actions(); ++b) {
            if (a == b) continue;
            Rational slack = 0;
            for (int w = 0; w < s.n_states(); ++w)
                slack += nu.nu[w][a] * (s.u_R[w][a] - s.u_R[w][b]);
            rep.table.push_back({a, b, slack});
            if (slack < 0) rep.max_violation = std::max(rep.max_violation, Rational(-slack));
        }
    }
    return rep;
}

DeviationReport copula_robustness(const Scenario& s, const Outcome& nu, const Belief& pi) {
    nu.check(s);
    if (pi.size() != s.n_states()) throw std::invalid_argument("copula_robustness: prior dimension");
    if (nu.state_marginal() != pi.p)
        throw std::invalid_argument("copula_robustness: outcome marginal differs from prior");

    // keep only fictitious columns with pi > 0; their conditional is defined
    std::vector<int> live;
    for (int j = 0; j < pi.size(); ++j)
        if (pi[j] > 0) live.push_back(j);

    // objective coefficient of c(w, xi): sum_a nu(xi, a) u_S(w, a) / pi(xi)
    RatMat cost(s.n_states(), RatVec(live.size(), 0));
    for (int w = 0; w < s.n_states(); ++w) {
        for (std::size_t k = 0; k < live.size(); ++k) {
            int xi = live[k];
            Rational v = 0;
            for (int a = 0; a < s.n_actions(); ++a) v += nu.nu[xi][a] * s.u_S[w][a];
            cost[w][k] = v / pi[xi];
        }
    }
    RatVec rows = pi.p;
    RatVec cols(live.size());
    for (std::size_t k = 0; k < live.size(); ++k) cols[k] = pi[live[k]];

    auto sol = solve_transportation(cost, rows, cols);
    if (sol.status != LpStatus::optimal)
        throw std::logic_error("copula_robustness: LP failed");
    for (int i = 0; i < pi.size(); ++i) {  // argmax coupling keeps both marginals
        Rational row_mass = 0;
        for (std::size_t k = 0; k < live.size(); ++k) row_mass += sol.point[i * live.size() + k];
        if (row_mass != pi[i]) throw std::logic_error("copula_robustness: marginal drift");
    }

    DeviationReport rep;
    rep.deviation = "copula";
    rep.exact = true;
    rep.baseline_q = nu.expected(s.u_S);
    rep.best_q = sol.value;
    rep.gain_q = rep.best_q - rep.baseline_q;

    std::string w;
    for (int i = 0; i < s.n_states(); ++i) {
        for (std::size_t k = 0; k < live.size(); ++k) {
            Rational mass = sol.point[i * live.size() + k];
            if (mass == 0) continue;
            if (!w.empty()) w += " ";
            w += "c(" + s.states[i] + "," + s.states[live[k]] + ")=" + to_string(mass);
        }
    }
    rep.witness = w;
    return rep;
}

DeviationReport marginal_preserving_deviation(const Scenario& s, const Belief& pi,
                                              const PosteriorFamily& family,
                                              const ResponseRule& kappa) {
    family.check_plausible(pi);
    DeviationReport rep;
    rep.deviation = "marginal_preserving";
    rep.exact = true;
    rep.baseline_q = family.sender_value(s, kappa);
    rep.best_q = sender_value_given_kappa(s, pi, family.lambda, kappa);
    rep.gain_q = rep.best_q - rep.baseline_q;

    RatMat cost(s.n_states(), RatVec(s.n_messages()));
    for (int w = 0; w < s.n_states(); ++w)
        for (int m = 0; m < s.n_messages(); ++m) cost[w][m] = kappa.cost(s, s.u_S, w, m);
    auto sol = solve_transportation(cost, pi.p, family.lambda);
    std::string w;
    for (int m = 0; m < s.n_messages(); ++m) {
        if (family.lambda[m] == 0) continue;
        if (!w.empty()) w += " ";
        w += "p~(" + s.messages[m] + ")=(";
        for (int st = 0; st < s.n_states(); ++st) {
            if (st) w += ",";
            w += to_string(sol.point[st * s.n_messages() + m] / family.lambda[m]);
        }
        w += ")";
    }
    rep.witness = w;
    return rep;
}

FictitiousStateStream::FictitiousStateStream(const ChainFacts& cf, const Copula& c) {
    if (!cf.is_pseudo_renewal)
        throw std::invalid_argument("fictitious stream: chain must be pseudo-renewal");
    c.check(cf.mu);
    const int n = cf.mu.size();
    renew_prob_.resize(n);
    cond_cdf_.resize(n);
    for (int w = 0; w < n; ++w) {
        // posterior P(renewal | state held at w) = B mu(w) / (1 - B + B mu(w))
        Rational num = cf.B * cf.mu[w];
        Rational den = (1 - cf.B) + num;
        renew_prob_[w] = den == 0 ? 1.0 : (num / den).convert_to<double>();
        std::vector<double> cdf(n);
        double acc = 0;
        for (int xi = 0; xi < n; ++xi) {
            acc += (c.c[w][xi] / cf.mu[w]).convert_to<double>();
            cdf[xi] = acc;
        }
        cdf.back() = 1.0;
        cond_cdf_[w] = std::move(cdf);
    }
    reset();
}

void FictitiousStateStream::reset() {
    prev_true_ = -1;
    prev_xi_ = -1;
}

int FictitiousStateStream::step(int true_state, RngStream& rng) {
    bool renew;
    if (prev_true_ < 0 || true_state != prev_true_)
        renew = true;
    else
        renew = rng.uniform() < renew_prob_[true_state];
    int xi = renew ? [&] {
        double u = rng.uniform();
        const auto& cdf = cond_cdf_[true_state];
        for (std::size_t i = 0; i + 1 < cdf.size(); ++i)
            if (u < cdf[i]) return static_cast<int>(i);
        return static_cast<int>(cdf.size()) - 1;
    }()
                   : prev_xi_;
    prev_true_ = true_state;
    prev_xi_ = xi;
    return xi;
}

namespace {

class CopulaSender final : public SenderStrategy {
  public:
    CopulaSender(std::unique_ptr<SenderStrategy> base, const ChainFacts& cf, const Copula& c)
        : base_(std::move(base)), stream_(cf, c), aux_(0) {}

    void reset() override {
        base_->reset();
        stream_.reset();
    }

    int act(int state, RngStream& rng) override {
        int xi = stream_.step(state, aux_);
        return base_->act(xi, rng);
    }

    void seed_aux(std::uint64_t seed) override { aux_ = RngStream(seed); }

  private:
    std::unique_ptr<SenderStrategy> base_;
    FictitiousStateStream stream_;
    RngStream aux_;
};

}  // namespace

std::unique_ptr<SenderStrategy> copula_deviation_strategy(
    std::unique_ptr<SenderStrategy> base, const ChainFacts& cf, const Copula& c) {
    return std::make_unique<CopulaSender>(std::move(base), cf, c);
}

ProfileSpec with_copula_sender(const Scenario& s, const ChainFacts& cf, const ProfileSpec& base,
                               const Copula& c) {
    (void)s;
    ProfileSpec p = base;
    p.name = base.name + "+copula";
    auto base_make = base.make_sender;
    p.make_sender = [base_make, cf, c]() {
        return copula_deviation_strategy(base_make(), cf, c);
    };
    return p;
}

DeviationSpec DeviationSpec::parse(const Scenario& s, const ChainFacts& cf,
                                   const std::string& name) {
    DeviationSpec d;
    if (name == "greedy") {
        d.kind = Kind::greedy_sender;
    } else if (name == "myopic") {
        d.kind = Kind::myopic_receiver;
    } else if (name == "even_flip") {
        d.kind = Kind::even_flip;
    } else if (name.rfind("copula:", 0) == 0) {
        d.kind = Kind::copula;
        std::string which = name.substr(7);
        if (which == "identity")
            d.copula = Copula::identity(cf.mu);
        else if (which == "swap")
            d.copula = Copula::swap(cf.mu);
        else if (which == "independent")
            d.copula = Copula::independent(cf.mu);
        else
            throw std::invalid_argument("unknown copula name: " + which);
        (void)s;
    } else {
        throw std::invalid_argument(
            "unknown deviation: " + name +
            " (expected greedy, myopic, even_flip or copula:{identity,swap,independent})");
    }
    return d;
}

std::string DeviationSpec::name() const {
    switch (kind) {
        case Kind::copula: return "copula";
        case Kind::greedy_sender: return "greedy";
        case Kind::myopic_receiver: return "myopic";
        case Kind::even_flip: return "even_flip";
    }
    return "?";
}

DeviationReport epsilon_gain(const Scenario& s, const ChainFacts& cf, const ProfileSpec& baseline,
                             const DeviationSpec& dev, const SimParams& params,
                             const BlockConfig* cfg) {
    ProfileSpec deviated = baseline;
    bool sender_side = true;
    switch (dev.kind) {
        case DeviationSpec::Kind::copula:
            deviated = with_copula_sender(s, cf, baseline, *dev.copula);
            break;
        case DeviationSpec::Kind::greedy_sender: {
            if (!cfg) throw std::invalid_argument("greedy deviation needs a block config");
            deviated.name = baseline.name + "+greedy";
            const Scenario sc = s;
            const BlockConfig c2 = *cfg;
            deviated.make_sender = [sc, c2]() { return build_greedy_sender(sc, c2); };
            break;
        }
        case DeviationSpec::Kind::myopic_receiver: {
            if (!cfg) throw std::invalid_argument("myopic deviation needs a block config");
            sender_side = false;
            deviated.name = baseline.name + "+myopic";
            auto tables = make_canonical_tables(s, cf, *cfg);
            const Scenario sc = s;
            const ChainFacts cf2 = cf;
            deviated.make_receiver = [sc, cf2, tables]() {
                return build_myopic_receiver(sc, cf2, tables);
            };
            break;
        }
        case DeviationSpec::Kind::even_flip: {
            if (!baseline.script_json)
                throw std::invalid_argument("even_flip deviation needs a scripted baseline");
            deviated = scripted_profile_from_json(
                s, nlohmann::json::parse(*baseline.script_json), /*flip_even_sender=*/true);
            break;
        }
    }

    SimReport base_run = simulate(s, cf, baseline, params);
    SimReport dev_run = simulate(s, cf, deviated, params);

    const auto& base_disc = sender_side ? base_run.rep_sender_disc : base_run.rep_receiver_disc;
    const auto& dev_disc = sender_side ? dev_run.rep_sender_disc : dev_run.rep_receiver_disc;
    const auto& base_avg = sender_side ? base_run.rep_sender_avg : base_run.rep_receiver_avg;
    const auto& dev_avg = sender_side ? dev_run.rep_sender_avg : dev_run.rep_receiver_avg;

    auto paired = [&](const std::vector<double>& b, const std::vector<double>& d, double& mean,
                      double& se) {
        const std::size_t n = b.size();
        double m = 0;
        for (std::size_t i = 0; i < n; ++i) m += d[i] - b[i];
        m /= static_cast<double>(n);
        double v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = d[i] - b[i] - m;
            v += x * x;
        }
        se = n > 1 ? std::sqrt(v / (n - 1.0) / n) : 0.0;
        mean = m;
    };

    DeviationReport rep;
    rep.deviation = dev.name();
    rep.exact = false;
    rep.baseline = sender_side ? base_run.sender_disc_mean : base_run.receiver_disc_mean;
    rep.best = sender_side ? dev_run.sender_disc_mean : dev_run.receiver_disc_mean;
    paired(base_disc, dev_disc, rep.gain, rep.stderr_);
    rep.baseline_avg = sender_side ? base_run.sender_avg_mean : base_run.receiver_avg_mean;
    rep.best_avg = sender_side ? dev_run.sender_avg_mean : dev_run.receiver_avg_mean;
    paired(base_avg, dev_avg, rep.gain_avg, rep.stderr_avg);
    rep.witness = deviated.name;
    return rep;
}

}  // namespace persuasion
