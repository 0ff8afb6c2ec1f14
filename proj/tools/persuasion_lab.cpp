// Command-line front end: scenario analysis, static equilibrium solving,
// payoff hulls, Monte Carlo simulation of the dynamic game, deviation
// checks, and the bundled example reproductions.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 input error.
#include "persuasion/acceptance.hpp"
#include "persuasion/deviation.hpp"
#include "persuasion/envelopes.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace persuasion;
using nlohmann::ordered_json;

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_lambda(const Scenario& s, const RatVec& lambda) {
    if (s.n_messages() == 2) return to_string(lambda[0]);
    std::string out;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (i) out += ":";
        out += to_string(lambda[i]);
    }
    return out;
}

RatVec parse_lambda(const Scenario& s, const std::string& text) {
    if (text.find(':') == std::string::npos) {
        if (s.n_messages() != 2)
            throw std::invalid_argument(
                "scalar --lambda works only with two messages; use w1:w2:... instead");
        Rational l = parse_rational(text);
        if (l < 0 || l > 1) throw std::invalid_argument("--lambda outside [0,1]");
        return {l, 1 - l};
    }
    RatVec lambda;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) lambda.push_back(parse_rational(tok));
    if (static_cast<int>(lambda.size()) != s.n_messages())
        throw std::invalid_argument("--lambda has the wrong number of entries");
    return lambda;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path.string());
    out << content;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::string& scenario_path, const ordered_json& params,
                    const ordered_json& outputs, const std::string& summary) {
    ordered_json m;
    m["command"] = command;
    m["scenario"] = scenario_path;
    m["parameters"] = params;
    m["outputs"] = outputs;
    m["summary"] = summary;
    write_file(dir / "manifest.json", m.dump(2) + "\n");
}

// canonical block profile from the sender-optimal equilibria at the
// requested marginals, one sub-block per marginal
struct CanonicalSetup {
    BlockConfig cfg;
    ProfileSpec profile;
};

CanonicalSetup make_canonical_setup(const Scenario& s, const ChainFacts& cf,
                                    const std::vector<RatVec>& lambdas, const RatVec& etas,
                                    long n_floor) {
    if (lambdas.empty()) throw std::invalid_argument("canonical profile needs --lambda");
    if (etas.size() != lambdas.size())
        throw std::invalid_argument("--eta must match the number of marginals");
    Belief mu = cf.mu;
    std::vector<SubBlockSpec> specs;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        auto records = enumerate_equilibria(s, mu, lambdas[i]);
        const EquilibriumRecord* best = &records.front();
        for (const auto& r : records)
            if (r.sender_value > best->sender_value) best = &r;
        specs.push_back({etas[i], best->witness, best->kappa});
    }
    CanonicalSetup setup{BlockConfig::make(specs, n_floor), {}};
    setup.profile = canonical_profile(s, cf, setup.cfg);
    return setup;
}

Outcome outcome_from_json_file(const Scenario& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open outcome file: " + path);
    nlohmann::json j;
    in >> j;
    if (!j.contains("nu")) throw std::invalid_argument("outcome file: missing key nu");
    Outcome nu;
    for (const auto& row : j.at("nu")) {
        RatVec r;
        for (const auto& v : row) {
            if (v.is_number_integer())
                r.push_back(Rational(v.get<long long>()));
            else if (v.is_string())
                r.push_back(parse_rational(v.get<std::string>()));
            else if (v.is_number_float())
                r.push_back(Rational(v.get<double>()));
            else
                throw std::invalid_argument("outcome file: bad entry");
        }
        nu.nu.push_back(std::move(r));
    }
    nu.check(s);
    return nu;
}

Outcome outcome_from_csv(const Scenario& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open outcome csv: " + path);
    Outcome nu;
    nu.nu.assign(s.n_states(), RatVec(s.n_actions(), 0));
    std::string line;
    std::getline(in, line);  // header
    Rational total = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string st, act, val;
        std::getline(ss, st, ',');
        std::getline(ss, act, ',');
        std::getline(ss, val, ',');
        Rational v(std::strtod(val.c_str(), nullptr));  // %.17g round-trips exactly
        nu.nu[s.state_index(st)][s.action_index(act)] = v;
        total += v;
    }
    if (total == 0) throw std::invalid_argument("outcome csv: empty");
    for (auto& row : nu.nu)
        for (auto& v : row) v /= total;
    nu.check(s);
    return nu;
}

std::string payoffs_csv(const SimReport& rep) {
    std::string out = "metric,mean,stderr\n";
    out += "sender_discounted," + fmt(rep.sender_disc_mean) + "," + fmt(rep.sender_disc_se) + "\n";
    out += "receiver_discounted," + fmt(rep.receiver_disc_mean) + "," + fmt(rep.receiver_disc_se) +
           "\n";
    out += "sender_average," + fmt(rep.sender_avg_mean) + "," + fmt(rep.sender_avg_se) + "\n";
    out += "receiver_average," + fmt(rep.receiver_avg_mean) + "," + fmt(rep.receiver_avg_se) + "\n";
    out += "replacement_fraction," + fmt(rep.replacement_fraction) + ",0\n";
    return out;
}

std::string frequencies_csv(const Scenario& s, const SimReport& rep) {
    std::string out = "series,period,state,message,value\n";
    for (long n = 0; n < rep.freq_window; ++n)
        for (int w = 0; w < s.n_states(); ++w)
            for (int m = 0; m < s.n_messages(); ++m)
                out += "freq," + std::to_string(n + 1) + "," + s.states[w] + "," + s.messages[m] +
                       "," + fmt(rep.freq[n][w][m]) + "\n";
    return out;
}

std::string outcome_csv(const Scenario& s, const SimReport& rep) {
    std::string out = "state,action,value\n";
    for (int w = 0; w < s.n_states(); ++w)
        for (int a = 0; a < s.n_actions(); ++a)
            out += s.states[w] + "," + s.actions[a] + "," + fmt(rep.outcome_weights[w][a]) + "\n";
    return out;
}

int cmd_analyze(const std::string& scenario_path) {
    Scenario s = load_scenario(scenario_path);
    auto cf = validate_scenario(s);
    Belief pi = static_prior(s, cf);

    std::printf("states: %d, messages: %d, actions: %d\n", s.n_states(), s.n_messages(),
                s.n_actions());
    std::printf("invariant distribution:");
    for (int w = 0; w < s.n_states(); ++w)
        std::printf(" %s=%s", s.states[w].c_str(), to_string(cf.mu[w]).c_str());
    std::printf("\n");
    std::printf("pseudo-renewal: %s", cf.is_pseudo_renewal ? "yes" : "no");
    if (cf.is_pseudo_renewal)
        std::printf(" (hold weight alpha=%s, redraw weight B=%s)", to_string(cf.alpha).c_str(),
                    to_string(cf.B).c_str());
    std::printf("\n");

    if (s.n_states() == 2) {
        auto bps = br_breakpoints(s);
        std::printf("best-response breakpoints:");
        if (bps.empty()) std::printf(" none");
        for (const auto& b : bps) std::printf(" %s", to_string(b).c_str());
        std::printf("\n");
    }
    std::printf("indirect utility at the prior: %s\n", to_string(indirect_utility(s, pi)).c_str());
    auto cav = cav_u(s, pi);
    std::printf("commitment (persuasion) value: %s%s\n", to_string(cav.value).c_str(),
                cav.exact ? "" : " (grid lower bound)");
    if (!cav.split.posteriors.empty()) {
        std::printf("  achieved by:");
        for (std::size_t j = 0; j < cav.split.posteriors.size(); ++j) {
            std::printf(" weight %s on (", to_string(cav.split.weights[j]).c_str());
            for (int w = 0; w < s.n_states(); ++w)
                std::printf("%s%s", w ? "," : "", to_string(cav.split.posteriors[j][w]).c_str());
            std::printf(")");
        }
        std::printf("\n");
    }
    if (s.n_states() == 2)
        std::printf("cheap-talk (quasi-concave) value: %s\n",
                    to_string(quasicav_u(s, pi)).c_str());
    return 0;
}

int cmd_solve_static(const std::string& scenario_path, const std::string& lambda_arg, long grid,
                     const std::string& out_dir) {
    Scenario s = load_scenario(scenario_path);
    auto cf = validate_scenario(s);
    Belief pi = static_prior(s, cf);

    std::vector<RatVec> lambdas;
    if (!lambda_arg.empty())
        lambdas.push_back(parse_lambda(s, lambda_arg));
    else {
        if (s.n_messages() != 2)
            throw std::invalid_argument("--grid sweeps need two messages; pass --lambda instead");
        for (long k = 0; k <= grid; ++k)
            lambdas.push_back({Rational(k, grid), Rational(grid - k, grid)});
    }

    std::string csv = "lambda,kappa,sender_value,receiver_min,receiver_max\n";
    std::string sweep_csv = "lambda,e_star\n";
    for (const auto& lambda : lambdas) {
        auto records = enumerate_equilibria(s, pi, lambda);
        Rational best = records.front().sender_value;
        for (const auto& rec : records) {
            best = std::max(best, rec.sender_value);
            csv += fmt_lambda(s, lambda) + "," + rec.kappa.describe(s, lambda) + "," +
                   to_string(rec.sender_value) + "," + to_string(rec.receiver_range.first) + "," +
                   to_string(rec.receiver_range.second) + "\n";
        }
        sweep_csv += fmt_lambda(s, lambda) + "," + to_string(best) + "\n";
    }

    std::filesystem::path dir(out_dir);
    write_file(dir / "equilibria.csv", csv);
    write_file(dir / "sweep.csv", sweep_csv);
    ordered_json params = {{"lambda", lambda_arg}, {"grid", grid}};
    ordered_json outputs = {{"equilibria", (dir / "equilibria.csv").string()},
                            {"sweep", (dir / "sweep.csv").string()}};
    write_manifest(dir, "solve-static", scenario_path, params, outputs, "ok");
    std::printf("wrote %s and %s\n", (dir / "equilibria.csv").string().c_str(),
                (dir / "sweep.csv").string().c_str());
    return 0;
}

int cmd_hull(const std::string& scenario_path, long grid, const std::string& out_dir) {
    Scenario s = load_scenario(scenario_path);
    auto cf = validate_scenario(s);
    Belief pi = static_prior(s, cf);

    auto hull = payoff_hull(s, pi, grid);
    std::string csv = "sender,receiver\n";
    for (const auto& p : hull) csv += to_string(p.x) + "," + to_string(p.y) + "\n";

    auto sweep = lambda_sweep(s, pi, grid);
    auto vhull = sweep_value_hull(sweep);
    std::string csv2 = "lambda,value\n";
    for (const auto& p : vhull) csv2 += to_string(p.x) + "," + to_string(p.y) + "\n";

    std::filesystem::path dir(out_dir);
    write_file(dir / "hull.csv", csv);
    write_file(dir / "sweep_hull.csv", csv2);
    write_manifest(dir, "hull", scenario_path, {{"grid", grid}},
                   {{"hull", (dir / "hull.csv").string()},
                    {"sweep_hull", (dir / "sweep_hull.csv").string()}},
                   "ok");
    std::printf("wrote %s and %s\n", (dir / "hull.csv").string().c_str(),
                (dir / "sweep_hull.csv").string().c_str());
    return 0;
}

struct SimArgs {
    std::string profile = "canonical";
    std::string lambda;
    std::string eta;
    long N = 600;
    double delta = 0.999;
    long horizon = 10000;
    int reps = 2000;
    std::uint64_t seed = 1;
    long freq_window = 0;
};

ProfileSpec build_profile(const Scenario& s, const ChainFacts& cf, const SimArgs& args,
                          BlockConfig* cfg_out) {
    if (args.profile == "canonical") {
        std::vector<RatVec> lambdas;
        std::stringstream ss(args.lambda);
        std::string tok;
        while (std::getline(ss, tok, ',')) lambdas.push_back(parse_lambda(s, tok));
        RatVec etas;
        if (args.eta.empty()) {
            etas.assign(lambdas.size(), Rational(1, static_cast<long>(lambdas.empty() ? 1 : lambdas.size())));
        } else {
            std::stringstream se(args.eta);
            while (std::getline(se, tok, ',')) etas.push_back(parse_rational(tok));
        }
        auto setup = make_canonical_setup(s, cf, lambdas, etas, args.N);
        if (cfg_out) *cfg_out = setup.cfg;
        return setup.profile;
    }
    if (args.profile.rfind("scripted:", 0) == 0) {
        std::string which = args.profile.substr(9);
        if (which == "example2") return scripted_profile(s, which);
        std::ifstream in(which);
        if (!in) throw std::invalid_argument("cannot open script file: " + which);
        nlohmann::json j;
        in >> j;
        return scripted_profile_from_json(s, j);
    }
    throw std::invalid_argument("unknown profile: " + args.profile +
                                " (expected canonical or scripted:<name-or-file>)");
}

int cmd_simulate(const std::string& scenario_path, const SimArgs& args,
                 const std::string& out_dir) {
    Scenario s = load_scenario(scenario_path);
    auto cf = validate_scenario(s);
    BlockConfig cfg;
    auto profile = build_profile(s, cf, args, &cfg);

    SimParams prm;
    prm.delta = args.delta;
    prm.horizon = args.horizon;
    prm.reps = args.reps;
    prm.seed = args.seed;
    if (args.freq_window > 0) prm.freq_window = args.freq_window;
    auto rep = simulate(s, cf, profile, prm);

    std::filesystem::path dir(out_dir);
    write_file(dir / "payoffs.csv", payoffs_csv(rep));
    write_file(dir / "frequencies.csv", frequencies_csv(s, rep));
    write_file(dir / "outcome.csv", outcome_csv(s, rep));
    ordered_json params = {{"profile", args.profile}, {"lambda", args.lambda},
                           {"eta", args.eta},         {"N", args.N},
                           {"delta", args.delta},     {"horizon", args.horizon},
                           {"reps", args.reps},       {"seed", args.seed}};
    ordered_json outputs = {{"payoffs", (dir / "payoffs.csv").string()},
                            {"frequencies", (dir / "frequencies.csv").string()},
                            {"outcome", (dir / "outcome.csv").string()}};
    write_manifest(dir, "simulate", scenario_path, params, outputs,
                   rep.quotas_exact ? "ok" : "quota violation");
    std::printf("sender %.4f +- %.4f, receiver %.4f +- %.4f (discounted, delta=%g)\n",
                rep.sender_disc_mean, rep.sender_disc_se, rep.receiver_disc_mean,
                rep.receiver_disc_se, args.delta);
    std::printf("wrote payoffs, frequencies and outcome under %s\n", dir.string().c_str());
    return 0;
}

int cmd_check_deviations(const std::string& scenario_path, const std::string& outcome_path,
                         const std::string& from_sim, const std::string& deviations,
                         const std::string& family_path, const SimArgs& sim_args,
                         const std::string& out_dir) {
    Scenario s = load_scenario(scenario_path);
    auto cf = validate_scenario(s);

    std::optional<Outcome> nu;
    if (!outcome_path.empty()) nu = outcome_from_json_file(s, outcome_path);
    if (!from_sim.empty()) {
        std::ifstream in(from_sim);
        if (!in) throw std::invalid_argument("cannot open manifest: " + from_sim);
        nlohmann::json m;
        in >> m;
        nu = outcome_from_csv(s, m.at("outputs").at("outcome").get<std::string>());
    }

    std::optional<PosteriorFamily> family;
    std::optional<ResponseRule> kappa;
    if (!family_path.empty()) {
        std::ifstream in(family_path);
        if (!in) throw std::invalid_argument("cannot open family file: " + family_path);
        nlohmann::json j;
        in >> j;
        PosteriorFamily f;
        for (const auto& v : j.at("lambda"))
            f.lambda.push_back(parse_rational(v.get<std::string>()));
        for (const auto& row : j.at("posteriors")) {
            RatVec p;
            for (const auto& v : row) p.push_back(parse_rational(v.get<std::string>()));
            f.posteriors.push_back(Belief(p));
        }
        ResponseRule k;
        for (const auto& a : j.at("kappa"))
            k.action.push_back(s.action_index(a.get<std::string>()));
        family = f;
        kappa = k;
        if (!nu) nu = Outcome::from_family(s, f, k);
    }

    std::string csv = "deviation,baseline,best,gain,stderr,witness\n";
    bool all_ok = true;
    // outcomes read back from a simulation are estimates: print them as
    // decimals and allow the Monte Carlo tolerance instead of exact zero
    const bool estimated = !from_sim.empty();
    const Rational tol = estimated ? Rational(1, 50) : Rational(0);
    auto fmt_q = [&](const Rational& q) {
        return estimated ? fmt(q.convert_to<double>()) : to_string(q);
    };

    std::stringstream ss(deviations);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (name == "obedience") {
            if (!nu) throw std::invalid_argument("obedience check needs an outcome");
            auto rep = obedience_residuals(s, *nu);
            std::string worst = "-";
            for (const auto& row : rep.table)
                if (row.slack < 0 && -row.slack == rep.max_violation)
                    worst = s.actions[row.taken] + "->" + s.actions[row.alt];
            csv += "obedience,,," + fmt_q(rep.max_violation) + ",," + worst + "\n";
            if (rep.max_violation > tol) all_ok = false;
        } else if (name == "copula") {
            if (!nu) throw std::invalid_argument("copula check needs an outcome");
            auto rep = copula_robustness(s, *nu, Belief(nu->state_marginal()));
            std::string witness = estimated ? std::string("argmax coupling") : rep.witness;
            csv += "copula," + fmt_q(rep.baseline_q) + "," + fmt_q(rep.best_q) + "," +
                   fmt_q(rep.gain_q) + ",," + witness + "\n";
            if (rep.gain_q > tol) all_ok = false;
        } else if (name == "marginal") {
            if (!family) throw std::invalid_argument("marginal check needs --family");
            auto rep = marginal_preserving_deviation(s, static_prior(s, cf), *family, *kappa);
            csv += "marginal_preserving," + to_string(rep.baseline_q) + "," +
                   to_string(rep.best_q) + "," + to_string(rep.gain_q) + ",," + rep.witness + "\n";
            if (rep.gain_q != 0) all_ok = false;
        } else {
            // simulated epsilon-gain families against the configured profile
            BlockConfig cfg;
            auto profile = build_profile(s, cf, sim_args, &cfg);
            SimParams prm;
            prm.delta = sim_args.delta;
            prm.horizon = sim_args.horizon;
            prm.reps = sim_args.reps;
            prm.seed = sim_args.seed;
            auto spec = DeviationSpec::parse(s, cf, name);
            auto rep = epsilon_gain(s, cf, profile, spec, prm,
                                    sim_args.profile == "canonical" ? &cfg : nullptr);
            csv += name + "," + fmt(rep.baseline) + "," + fmt(rep.best) + "," + fmt(rep.gain) +
                   "," + fmt(rep.stderr_) + "," + rep.witness + "\n";
            if (rep.gain > 0.03) all_ok = false;
        }
    }

    std::filesystem::path dir(out_dir);
    write_file(dir / "deviations.csv", csv);
    ordered_json params = {{"outcome", outcome_path},
                           {"from_sim", from_sim},
                           {"deviations", deviations},
                           {"family", family_path},
                           {"seed", sim_args.seed}};
    write_manifest(dir, "check-deviations", scenario_path, params,
                   {{"deviations", (dir / "deviations.csv").string()}},
                   all_ok ? "ok" : "deviation found");
    std::printf("%s", csv.c_str());
    return all_ok ? 0 : 1;
}

int cmd_examples(const std::string& which) {
    auto results = run_acceptance(which);
    print_results(results, /*verbose=*/true);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass()) ++failed;
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failed,
                results.size());
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact solvers and a Monte Carlo lab for persuasion with partial commitment"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir = ".";
    std::string lambda_arg, outcome_path, from_sim, family_path;
    std::string deviations = "obedience,copula";
    long grid = 12;
    SimArgs sim;

    auto* analyze = app.add_subcommand("analyze", "chain facts, breakpoints and envelope values");
    analyze->add_option("scenario", scenario_path)->required();

    auto* solve = app.add_subcommand("solve-static", "equilibria per marginal, plus the sweep");
    solve->add_option("scenario", scenario_path)->required();
    solve->add_option("--lambda", lambda_arg, "message marginal, e.g. 1/3 or 1/4:3/4");
    solve->add_option("--grid", grid, "sweep denominator D for binary messages");
    solve->add_option("--out", out_dir);

    auto* hull = app.add_subcommand("hull", "equilibrium payoff hull across marginals");
    hull->add_option("scenario", scenario_path)->required();
    hull->add_option("--grid", grid);
    hull->add_option("--out", out_dir);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run of a dynamic profile");
    simulate_cmd->add_option("scenario", scenario_path)->required();
    simulate_cmd->add_option("--profile", sim.profile, "canonical | scripted:<name-or-file>");
    simulate_cmd->add_option("--lambda", sim.lambda,
                             "marginal(s) for the canonical profile, comma-separated");
    simulate_cmd->add_option("--eta", sim.eta, "sub-block weights for multiple marginals");
    simulate_cmd->add_option("--N", sim.N, "block length floor");
    simulate_cmd->add_option("--delta", sim.delta);
    simulate_cmd->add_option("--horizon", sim.horizon);
    simulate_cmd->add_option("--reps", sim.reps);
    simulate_cmd->add_option("--seed", sim.seed);
    simulate_cmd->add_option("--freq-window", sim.freq_window);
    simulate_cmd->add_option("--out", out_dir);

    auto* check = app.add_subcommand("check-deviations", "deviation reports for an outcome");
    check->add_option("scenario", scenario_path)->required();
    check->add_option("--outcome", outcome_path, "outcome JSON ({\"nu\": [[...]]})");
    check->add_option("--from-sim", from_sim, "manifest of a simulate run");
    check->add_option("--deviations", deviations,
                      "comma list: obedience, copula, marginal, greedy, myopic, even_flip, "
                      "copula:{identity,swap,independent}");
    check->add_option("--family", family_path, "posterior family JSON for the marginal check");
    check->add_option("--profile", sim.profile);
    check->add_option("--lambda", sim.lambda);
    check->add_option("--eta", sim.eta);
    check->add_option("--N", sim.N);
    check->add_option("--delta", sim.delta);
    check->add_option("--horizon", sim.horizon);
    check->add_option("--reps", sim.reps);
    check->add_option("--seed", sim.seed);
    check->add_option("--out", out_dir);

    auto* examples = app.add_subcommand("examples", "bundled reproductions with pass/fail checks");
    std::string which = "all";
    examples->add_option("which", which, "example1 | example2 | all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return cmd_analyze(scenario_path);
        if (*solve) return cmd_solve_static(scenario_path, lambda_arg, grid, out_dir);
        if (*hull) return cmd_hull(scenario_path, grid, out_dir);
        if (*simulate_cmd) return cmd_simulate(scenario_path, sim, out_dir);
        if (*check)
            return cmd_check_deviations(scenario_path, outcome_path, from_sim, deviations,
                                        family_path, sim, out_dir);
        if (*examples) return cmd_examples(which);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 2;
    }
    return 2;
}
