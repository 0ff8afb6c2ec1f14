#include "persuasion/scenario.hpp"

#include "persuasion/lp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

namespace persuasion {

Belief::Belief(RatVec probs) : p(std::move(probs)) {
    if (p.empty()) throw std::invalid_argument("belief: empty");
    for (const auto& v : p)
        if (v < 0) throw std::invalid_argument("belief: negative entry");
    if (vec_sum(p) != 1) throw std::invalid_argument("belief: entries must sum to 1");
}

const Rational& Belief::second() const {
    if (p.size() != 2) throw std::invalid_argument("belief: binary accessor on non-binary belief");
    return p[1];
}

static int index_of(const std::vector<std::string>& labels, const std::string& label,
                    const char* kind) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        throw std::invalid_argument(std::string("unknown ") + kind + " label: " + label);
    return static_cast<int>(it - labels.begin());
}

int Scenario::state_index(const std::string& l) const { return index_of(states, l, "state"); }
int Scenario::message_index(const std::string& l) const { return index_of(messages, l, "message"); }
int Scenario::action_index(const std::string& l) const { return index_of(actions, l, "action"); }

Rational Scenario::max_abs_payoff() const {
    Rational m = 0;
    for (const auto* mat : {&u_S, &u_R})
        for (const auto& row : *mat)
            for (const auto& v : row) m = std::max(m, v < 0 ? Rational(-v) : v);
    return m;
}

namespace {

void check_distinct(const std::vector<std::string>& labels, const char* kind) {
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw std::invalid_argument(std::string("duplicate ") + kind + " labels");
}

bool strongly_connected(const RatMat& q) {
    const int n = static_cast<int>(q.size());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) reach[i][j] = (q[i][j] > 0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

// period of an irreducible chain: gcd of d(u)+1-d(v) over edges, with d a
// BFS labelling from state 0
long chain_period(const RatMat& q) {
    const int n = static_cast<int>(q.size());
    std::vector<long> d(n, -1);
    std::vector<int> queue = {0};
    d[0] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        int u = queue[h];
        for (int v = 0; v < n; ++v) {
            if (q[u][v] > 0 && d[v] < 0) {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    long g = 0;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (q[u][v] > 0) g = std::gcd(g, std::abs(d[u] + 1 - d[v]));
    return g == 0 ? 1 : g;
}

}  // namespace

ChainFacts validate_scenario(const Scenario& s) {
    const int n = s.n_states();
    if (n == 0 || s.n_messages() == 0 || s.n_actions() == 0)
        throw std::invalid_argument("scenario: states, messages and actions must be nonempty");
    check_distinct(s.states, "state");
    check_distinct(s.messages, "message");
    check_distinct(s.actions, "action");
    if (s.n_messages() < std::min(s.n_states(), s.n_actions()))
        throw std::invalid_argument("scenario: need |M| >= min(|states|, |actions|)");

    auto check_payoff = [&](const RatMat& u, const char* name) {
        if (static_cast<int>(u.size()) != n)
            throw std::invalid_argument(std::string(name) + ": wrong number of rows");
        for (const auto& row : u)
            if (static_cast<int>(row.size()) != s.n_actions())
                throw std::invalid_argument(std::string(name) + ": wrong number of columns");
    };
    check_payoff(s.u_S, "u_S");
    check_payoff(s.u_R, "u_R");

    if (static_cast<int>(s.Q.size()) != n)
        throw std::invalid_argument("Q: wrong number of rows");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(s.Q[i].size()) != n)
            throw std::invalid_argument("Q: wrong number of columns");
        Rational sum = 0;
        for (const auto& v : s.Q[i]) {
            if (v < 0 || v > 1) throw std::invalid_argument("Q: entry outside [0,1]");
            sum += v;
        }
        if (sum != 1) throw std::invalid_argument("Q: row " + s.states[i] + " does not sum to 1");
    }
    if (s.prior_override && s.prior_override->size() != n)
        throw std::invalid_argument("prior: wrong dimension");

    if (!strongly_connected(s.Q))
        throw std::invalid_argument("chain: reducible (not all states communicate)");
    if (chain_period(s.Q) != 1)
        throw std::invalid_argument("chain: periodic");

    // invariant distribution: (Q^T - I) mu = 0 plus normalization
    RatMat a(n + 1, RatVec(n, 0));
    RatVec b(n + 1, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) a[j][i] = s.Q[i][j];
        a[j][j] -= 1;
    }
    for (int i = 0; i < n; ++i) a[n][i] = 1;
    b[n] = 1;
    auto mu = solve_linear_system(a, b);
    if (!mu) throw std::invalid_argument("chain: invariant distribution is not unique");

    ChainFacts cf;
    cf.mu = Belief(*mu);
    cf.Q = s.Q;
    cf.is_irreducible = true;
    cf.is_aperiodic = true;

    cf.is_pseudo_renewal = true;
    cf.beta.assign(n, Rational(0));
    if (n == 1) {
        cf.beta[0] = 1;  // single state: redraw representation with B = 1
    } else {
        for (int dest = 0; dest < n; ++dest) {
            bool first = true;
            for (int src = 0; src < n; ++src) {
                if (src == dest) continue;
                if (first) {
                    cf.beta[dest] = s.Q[src][dest];
                    first = false;
                } else if (s.Q[src][dest] != cf.beta[dest]) {
                    cf.is_pseudo_renewal = false;
                }
            }
        }
    }
    if (cf.is_pseudo_renewal) {
        cf.B = vec_sum(cf.beta);
        cf.alpha = 1 - cf.B;
        for (int i = 0; i < n; ++i)
            if (cf.beta[i] != cf.B * cf.mu[i])
                throw std::invalid_argument("chain: pseudo-renewal rates inconsistent with mu");
    } else {
        cf.beta.clear();
        cf.B = 0;
        cf.alpha = 0;
    }
    return cf;
}

std::pair<std::vector<int>, Rational> best_responses(const Scenario& s, const Belief& p) {
    if (p.size() != s.n_states()) throw std::invalid_argument("best_responses: belief dimension");
    std::vector<int> best;
    Rational best_val = 0;
    for (int a = 0; a < s.n_actions(); ++a) {
        Rational v = 0;
        for (int w = 0; w < s.n_states(); ++w) v += p[w] * s.u_R[w][a];
        if (best.empty() || v > best_val) {
            best = {a};
            best_val = v;
        } else if (v == best_val) {
            best.push_back(a);
        }
    }
    return {best, best_val};
}

Rational indirect_utility(const Scenario& s, const Belief& p) {
    auto [acts, val] = best_responses(s, p);
    (void)val;
    Rational best = 0;
    bool first = true;
    for (int a : acts) {
        Rational v = 0;
        for (int w = 0; w < s.n_states(); ++w) v += p[w] * s.u_S[w][a];
        if (first || v > best) {
            best = v;
            first = false;
        }
    }
    return best;
}

std::vector<Rational> br_breakpoints(const Scenario& s) {
    if (s.n_states() != 2)
        throw std::invalid_argument("br_breakpoints: binary-state scenarios only");
    // candidate thresholds: pairwise indifference points in (0,1)
    std::set<Rational> candidates;
    for (int a = 0; a < s.n_actions(); ++a) {
        for (int b = a + 1; b < s.n_actions(); ++b) {
            // (1-p) u(0,a) + p u(1,a) = (1-p) u(0,b) + p u(1,b)
            Rational da = s.u_R[0][a] - s.u_R[0][b];
            Rational db = s.u_R[1][b] - s.u_R[1][a];
            if (da + db == 0) continue;  // parallel
            Rational p = da / (da + db);
            if (p > 0 && p < 1) candidates.insert(p);
        }
    }
    std::vector<Rational> cand(candidates.begin(), candidates.end());
    // keep only points where the best-response set changes across sides
    std::vector<Rational> cuts = {Rational(0)};
    cuts.insert(cuts.end(), cand.begin(), cand.end());
    cuts.push_back(1);
    auto br_at = [&](const Rational& p) { return best_responses(s, Belief::binary(p)).first; };
    std::vector<Rational> result;
    for (std::size_t k = 1; k + 1 < cuts.size(); ++k) {
        Rational left_mid = (cuts[k - 1] + cuts[k]) / 2;
        Rational right_mid = (cuts[k] + cuts[k + 1]) / 2;
        if (br_at(left_mid) != br_at(right_mid)) result.push_back(cuts[k]);
    }
    return result;
}

Belief next_belief(const ChainFacts& cf, const Belief& p) {
    const int n = static_cast<int>(cf.Q.size());
    if (p.size() != n) throw std::invalid_argument("next_belief: belief dimension");
    RatVec q(n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) q[j] += p[i] * cf.Q[i][j];
    if (cf.is_pseudo_renewal) {
        for (int j = 0; j < n; ++j)
            if (q[j] != cf.alpha * p[j] + (1 - cf.alpha) * cf.mu[j])
                throw std::logic_error("next_belief: pseudo-renewal decomposition violated");
    }
    return Belief(q);
}

Belief static_prior(const Scenario& s, const ChainFacts& cf) {
    return s.prior_override ? *s.prior_override : cf.mu;
}

namespace {

Rational entry_from_json(const nlohmann::json& v, const std::string& path) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ": not a rational \"p/q\" literal");
        }
    }
    throw std::invalid_argument(path + ": expected integer or \"p/q\" string");
}

RatMat matrix_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument(key + ": missing");
    const auto& m = j.at(key);
    if (!m.is_array() || m.empty()) throw std::invalid_argument(key + ": expected array of rows");
    RatMat out;
    std::size_t width = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& row = m[i];
        std::string rowpath = key + "[" + std::to_string(i) + "]";
        if (!row.is_array()) throw std::invalid_argument(rowpath + ": expected array");
        if (i == 0)
            width = row.size();
        else if (row.size() != width)
            throw std::invalid_argument(rowpath + ": ragged matrix");
        RatVec r;
        for (std::size_t k = 0; k < row.size(); ++k)
            r.push_back(entry_from_json(row[k], rowpath + "[" + std::to_string(k) + "]"));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> labels_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw std::invalid_argument(key + ": missing");
    const auto& a = j.at(key);
    if (!a.is_array()) throw std::invalid_argument(key + ": expected array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_string())
            throw std::invalid_argument(key + "[" + std::to_string(i) + "]: expected string");
        out.push_back(a[i].get<std::string>());
    }
    return out;
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    s.states = labels_from_json(j, "states");
    s.messages = labels_from_json(j, "messages");
    s.actions = labels_from_json(j, "actions");
    s.u_S = matrix_from_json(j, "u_S");
    s.u_R = matrix_from_json(j, "u_R");
    s.Q = matrix_from_json(j, "Q");
    if (j.contains("prior")) {
        const auto& pr = j.at("prior");
        if (!pr.is_array()) throw std::invalid_argument("prior: expected array");
        RatVec p;
        for (std::size_t i = 0; i < pr.size(); ++i)
            p.push_back(entry_from_json(pr[i], "prior[" + std::to_string(i) + "]"));
        try {
            s.prior_override = Belief(p);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("prior: ") + e.what());
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": invalid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

}  // namespace persuasion
