#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "persuasion/acceptance.hpp"
#include "persuasion/deviation.hpp"

#include <cmath>
#include <random>

using namespace persuasion;

namespace {

ResponseRule rule(std::vector<int> acts) {
    ResponseRule k;
    k.action = std::move(acts);
    return k;
}

PosteriorFamily family2(RatVec lambda, Rational p1, Rational p2) {
    PosteriorFamily f;
    f.lambda = std::move(lambda);
    f.posteriors = {Belief::binary(p1), Belief::binary(p2)};
    return f;
}

// the alternating-reveal limit outcome, assembled analytically
Outcome example2_limit_outcome() {
    Outcome nu;
    nu.nu = {{Rational(1, 4), Rational(1, 6), Rational(1, 12), 0},
             {0, Rational(1, 12), Rational(1, 6), Rational(1, 4)}};
    return nu;
}

Outcome apply_copula(const Outcome& nu, const Copula& c, const Belief& pi) {
    Outcome out;
    out.nu.assign(nu.nu.size(), RatVec(nu.nu[0].size(), 0));
    for (std::size_t w = 0; w < nu.nu.size(); ++w)
        for (std::size_t xi = 0; xi < nu.nu.size(); ++xi) {
            if (pi[static_cast<int>(xi)] == 0) continue;
            Rational cond = c.c[w][xi] / pi[static_cast<int>(xi)];
            for (std::size_t a = 0; a < nu.nu[0].size(); ++a)
                out.nu[w][a] += cond * nu.nu[xi][a];
        }
    return out;
}

BlockConfig ex1_config(long n_floor) {
    SubBlockSpec sp{1, family2({Rational(1, 3), Rational(2, 3)}, 0, Rational(3, 4)),
                    rule({0, 1})};
    return BlockConfig::make({sp}, n_floor);
}

}  // namespace

TEST_CASE("obedience residuals") {
    Scenario s = bundled_scenario("example2");
    SUBCASE("alternating-reveal limit outcome is obedient") {
        // oracle: each action's conditional belief (0, 1/3, 2/3, 1) sits in
        // its own best-response region
        auto nu = example2_limit_outcome();
        Rational conds[4] = {0, Rational(1, 3), Rational(2, 3), 1};
        for (int a = 0; a < 4; ++a) {
            auto acts = best_responses(s, Belief::binary(conds[a])).first;
            bool ok = false;
            for (int b : acts)
                if (b == a) ok = true;
            CHECK(ok);
        }
        CHECK(obedience_residuals(s, nu).max_violation == 0);
    }
    SUBCASE("dominated point mass is flagged with the right magnitude") {
        Outcome nu;
        nu.nu = {{0, 0, 0, 1}, {0, 0, 0, 0}};
        auto rep = obedience_residuals(s, nu);
        CHECK(rep.max_violation == 8);  // a1 beats a4 by 8 at the degenerate belief
    }
    SUBCASE("static equilibrium witnesses are obedient") {
        Scenario s1 = bundled_scenario("example1");
        Belief pi = Belief::binary(Rational(1, 2));
        for (long k = 0; k <= 4; ++k) {
            RatVec lambda = {Rational(k, 4), Rational(4 - k, 4)};
            for (const auto& rec : enumerate_equilibria(s1, pi, lambda)) {
                auto nu = Outcome::from_family(s1, rec.witness, rec.kappa);
                CHECK(obedience_residuals(s1, nu).max_violation == 0);
            }
        }
    }
}

TEST_CASE("copula robustness LP") {
    Scenario s = bundled_scenario("example2");
    Belief pi = Belief::binary(Rational(1, 2));

    SUBCASE("uninformative outcomes cannot be improved") {
        Scenario s1 = bundled_scenario("example1");
        Outcome nu;
        nu.nu = {{0, 0, Rational(1, 2)}, {0, 0, Rational(1, 2)}};
        auto rep = copula_robustness(s1, nu, pi);
        CHECK(rep.gain_q == 0);
    }
    SUBCASE("deviation-prone static outcome yields 3/4 at the swap coupling") {
        PosteriorFamily f = family2({Rational(1, 4), Rational(3, 4)}, 0, Rational(2, 3));
        auto nu = Outcome::from_family(s, f, rule({0, 2}));
        auto rep = copula_robustness(s, nu, pi);
        CHECK(rep.baseline_q == 0);
        CHECK(rep.best_q == Rational(3, 4));
        CHECK(rep.gain_q == Rational(3, 4));
        // oracle: both vertices of the binary uniform copula polytope
        auto swapped = apply_copula(nu, Copula::swap(pi), pi);
        CHECK(swapped.expected(s.u_S) == Rational(3, 4));
    }
    SUBCASE("alternating-reveal limit outcome is robust") {
        auto nu = example2_limit_outcome();
        auto rep = copula_robustness(s, nu, pi);
        CHECK(rep.baseline_q == Rational(1, 3));
        CHECK(rep.gain_q == 0);
        auto swapped = apply_copula(nu, Copula::swap(pi), pi);
        CHECK(swapped.expected(s.u_S) == Rational(1, 6));
    }
}

TEST_CASE("binary uniform copula polytope has exactly two vertices") {
    Belief pi = Belief::binary(Rational(1, 2));
    auto identity = Copula::identity(pi), swap = Copula::swap(pi);
    std::mt19937 gen(40);
    std::uniform_int_distribution<int> coef(-9, 9);
    for (int trial = 0; trial < 25; ++trial) {
        RatMat cost = {{coef(gen), coef(gen)}, {coef(gen), coef(gen)}};
        auto sol = solve_transportation(cost, pi.p, pi.p);
        REQUIRE(sol.status == LpStatus::optimal);
        RatMat got = {{sol.point[0], sol.point[1]}, {sol.point[2], sol.point[3]}};
        CHECK((got == identity.c || got == swap.c));
    }
}

TEST_CASE("copula deviations preserve the state marginal") {
    Scenario s = bundled_scenario("example2");
    Belief pi = Belief::binary(Rational(1, 2));
    auto nu = example2_limit_outcome();
    for (const Copula& c : {Copula::identity(pi), Copula::swap(pi), Copula::independent(pi)}) {
        c.check(pi);
        auto dev = apply_copula(nu, c, pi);
        CHECK(dev.state_marginal() == pi.p);
        Rational total = 0;
        for (const auto& row : dev.nu)
            for (const auto& v : row) total += v;
        CHECK(total == 1);
    }
}

TEST_CASE("fictitious state stream") {
    Scenario s = bundled_scenario("example2");
    auto cf = validate_scenario(s);

    SUBCASE("identity coupling copies the chain") {
        FictitiousStateStream fs(cf, Copula::identity(cf.mu));
        RngStream chain(1), aux(2);
        int w = chain.sample_cdf({0.5, 1.0});
        for (int n = 0; n < 2000; ++n) {
            CHECK(fs.step(w, aux) == w);
            w = (aux.uniform() < (w == 0 ? 1.0 / 3 : 2.0 / 3)) ? 1 - w : w;
        }
    }
    SUBCASE("swap coupling mirrors the chain") {
        FictitiousStateStream fs(cf, Copula::swap(cf.mu));
        RngStream aux(3), chain(4);
        int w = 0;
        for (int n = 0; n < 2000; ++n) {
            CHECK(fs.step(w, aux) == 1 - w);
            if (chain.uniform() < (w == 0 ? 1.0 / 3 : 1.0 / 3)) w = 1 - w;
        }
    }
    SUBCASE("interior coupling matches chain law and joint law") {
        Copula c;
        c.c = {{Rational(3, 8), Rational(1, 8)}, {Rational(1, 8), Rational(3, 8)}};
        c.check(cf.mu);
        FictitiousStateStream fs(cf, c);
        RngStream chain(5), aux(6);
        const long steps = 100000;
        int w = chain.sample_cdf({0.5, 1.0});
        int xi_prev = -1;
        long joint[2][2] = {{0, 0}, {0, 0}};
        long trans[2][2] = {{0, 0}, {0, 0}};
        long from[2] = {0, 0};
        for (long n = 0; n < steps; ++n) {
            int xi = fs.step(w, aux);
            ++joint[w][xi];
            if (xi_prev >= 0) {
                ++trans[xi_prev][xi];
                ++from[xi_prev];
            }
            xi_prev = xi;
            w = (chain.uniform() < (w == 0 ? 1.0 / 3 : 1.0 / 3)) ? 1 - w : w;
        }
        // transitions of the fictitious path within 3 s.e. of the chain
        for (int i = 0; i < 2; ++i) {
            double p = (i == 0) ? 2.0 / 3 : 1.0 / 3;  // P(next = w1 | i)
            double freq = static_cast<double>(trans[i][0]) / from[i];
            double se = std::sqrt(p * (1 - p) / from[i]);
            CHECK(std::abs(freq - p) <= 3 * se);
        }
        // per-period joint of (true, fictitious) within 3 s.e. of the copula
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double p = (c.c[i][j]).convert_to<double>();
                double freq = static_cast<double>(joint[i][j]) / steps;
                double se = std::sqrt(p * (1 - p) / steps);
                CHECK(std::abs(freq - p) <= 3 * se);
            }
    }
    SUBCASE("true state is conditionally independent of the earlier fictitious path") {
        Copula c;
        c.c = {{Rational(3, 8), Rational(1, 8)}, {Rational(1, 8), Rational(3, 8)}};
        FictitiousStateStream fs(cf, c);
        RngStream chain(70), aux(71);
        const long steps = 200000;
        int w = chain.sample_cdf({0.5, 1.0});
        int xi_prev = -1;
        long counts[2][2][2] = {};  // [xi_prev][xi][w]
        for (long n = 0; n < steps; ++n) {
            int xi = fs.step(w, aux);
            if (xi_prev >= 0) ++counts[xi_prev][xi][w];
            xi_prev = xi;
            w = (chain.uniform() < 1.0 / 3) ? 1 - w : w;
        }
        // P(w | xi, xi_prev) must match c(w | xi) for either xi_prev
        for (int prev = 0; prev < 2; ++prev) {
            for (int xi = 0; xi < 2; ++xi) {
                long total = counts[prev][xi][0] + counts[prev][xi][1];
                REQUIRE(total > 1000);
                double p = (c.c[xi][xi] * 2).convert_to<double>();  // c(w=xi | xi), mu = 1/2
                double freq = static_cast<double>(counts[prev][xi][xi]) / total;
                double se = std::sqrt(p * (1 - p) / total);
                CHECK(std::abs(freq - p) <= 3 * se);
            }
        }
    }
    SUBCASE("non-pseudo-renewal chains are rejected") {
        ChainFacts broken = cf;
        broken.is_pseudo_renewal = false;
        CHECK_THROWS_AS(FictitiousStateStream(broken, Copula::identity(cf.mu)),
                        std::invalid_argument);
    }
}

TEST_CASE("marginal-preserving deviation reports") {
    Scenario s1 = bundled_scenario("example1");
    Belief pi = Belief::binary(Rational(1, 2));
    SUBCASE("equilibrium family has no slack") {
        PosteriorFamily f = family2({Rational(1, 3), Rational(2, 3)}, 0, Rational(3, 4));
        auto rep = marginal_preserving_deviation(s1, pi, f, rule({0, 1}));
        CHECK(rep.exact);
        CHECK(rep.gain_q == 0);
    }
    SUBCASE("the 3/4 improvement is found") {
        Scenario s2 = bundled_scenario("example2");
        PosteriorFamily f = family2({Rational(1, 4), Rational(3, 4)}, 0, Rational(2, 3));
        auto rep = marginal_preserving_deviation(s2, pi, f, rule({0, 2}));
        CHECK(rep.baseline_q == 0);
        CHECK(rep.gain_q == Rational(3, 4));
    }
    SUBCASE("constant rules leave nothing to gain") {
        PosteriorFamily f = family2({Rational(1, 4), Rational(3, 4)}, Rational(1, 2),
                                    Rational(1, 2));
        for (int a = 0; a < 3; ++a)
            CHECK(marginal_preserving_deviation(s1, pi, f, rule({a, a})).gain_q == 0);
    }
}

TEST_CASE("copula deviation strategies against simulated profiles") {
    SimParams prm;
    prm.delta = 0.999;
    prm.horizon = 10000;
    prm.reps = 400;
    prm.seed = 2718;

    SUBCASE("identity coupling changes nothing") {
        Scenario s = bundled_scenario("example2");
        auto cf = validate_scenario(s);
        auto base = scripted_profile(s, "example2");
        auto rep = epsilon_gain(s, cf, base, DeviationSpec::parse(s, cf, "copula:identity"), prm);
        CHECK(std::abs(rep.gain) <= 2 * rep.stderr_ + 1e-9);
    }
    SUBCASE("independent coupling leaves a state-blind sender unchanged") {
        Scenario s = bundled_scenario("example1");
        auto cf = validate_scenario(s);
        auto base = canonical_profile(s, cf, ex1_config(600));
        auto rep = epsilon_gain(s, cf, base, DeviationSpec::parse(s, cf, "copula:independent"),
                                prm);
        CHECK(std::abs(rep.best - 5.0 / 3.0) < 0.02);
        CHECK(std::abs(rep.gain) < 0.02);
    }
    SUBCASE("swap coupling against the alternating-reveal profile") {
        Scenario s = bundled_scenario("example2");
        auto cf = validate_scenario(s);
        auto base = scripted_profile(s, "example2");
        auto rep = epsilon_gain(s, cf, base, DeviationSpec::parse(s, cf, "copula:swap"), prm);
        CHECK(std::abs(rep.baseline - 1.0 / 3.0) < 0.02);
        CHECK(std::abs(rep.best - 1.0 / 6.0) < 0.02);
    }
}

TEST_CASE("copula deviations are undetectable in message frequencies") {
    Scenario s = bundled_scenario("example2");
    auto cf = validate_scenario(s);
    SimParams prm;
    prm.delta = 0.999;
    prm.horizon = 10000;
    prm.reps = 4000;
    prm.seed = 99;
    prm.freq_window = 12;
    auto base = simulate(s, cf, scripted_profile(s, "example2"), prm);
    auto dev = simulate(s, cf,
                        with_copula_sender(s, cf, scripted_profile(s, "example2"),
                                           Copula::swap(cf.mu)),
                        prm);
    for (long n = 0; n < prm.freq_window; ++n) {
        for (int m = 0; m < 2; ++m) {
            double f0 = base.freq[n][0][m] + base.freq[n][1][m];
            double f1 = dev.freq[n][0][m] + dev.freq[n][1][m];
            double p = 0.5;
            double se = std::sqrt(2.0 * p * (1 - p) / prm.reps);  // pooled
            CHECK(std::abs(f0 - f1) <= 4 * se);
        }
    }
}

TEST_CASE("named dynamic deviations") {
    Scenario s1 = bundled_scenario("example1");
    auto cf1 = validate_scenario(s1);
    auto cfg = ex1_config(600);
    auto base = canonical_profile(s1, cf1, cfg);
    SimParams prm;
    prm.delta = 0.999;
    prm.horizon = 6000;
    prm.reps = 120;
    prm.seed = 314;

    SUBCASE("greedy sender front-loads but cannot beat the quota in the long run") {
        auto rep = epsilon_gain(s1, cf1, base, DeviationSpec::parse(s1, cf1, "greedy"), prm,
                                &cfg);
        // within-block discounting keeps a visible front-loading premium at
        // this delta; the horizon-average gain is near zero
        CHECK(rep.gain > 0.0);
        CHECK(rep.gain < 0.1);
        CHECK(std::abs(rep.gain_avg) < 0.02);
    }
    SUBCASE("myopic receiver only recovers the quota-tail losses") {
        auto rep = epsilon_gain(s1, cf1, base, DeviationSpec::parse(s1, cf1, "myopic"), prm,
                                &cfg);
        CHECK(rep.gain >= 0.0);
        CHECK(rep.gain < 0.08);
    }
    SUBCASE("even-period flips are punished hard") {
        Scenario s2 = bundled_scenario("example2");
        auto cf2 = validate_scenario(s2);
        auto scripted = scripted_profile(s2, "example2");
        SimParams p2 = prm;
        p2.horizon = 10000;
        auto rep = epsilon_gain(s2, cf2, scripted, DeviationSpec::parse(s2, cf2, "even_flip"),
                                p2);
        // post-trigger flow payoff: E_mu u_S(., a1) = 0, against 1/3 on path
        CHECK(Rational(1, 2) * s2.u_S[0][0] + Rational(1, 2) * s2.u_S[1][0] == 0);
        CHECK(rep.gain < -0.25);
    }
    SUBCASE("unknown deviation names are rejected") {
        CHECK_THROWS_AS(DeviationSpec::parse(s1, cf1, "teleport"), std::invalid_argument);
    }
}

TEST_CASE("simulated canonical payoffs stay inside the static payoff hull") {
    Scenario s = bundled_scenario("example1");
    auto cf = validate_scenario(s);
    auto hull = payoff_hull(s, cf.mu, 6);

    // inflate the hull by eps in both coordinates, then test exact membership
    const Rational eps(3, 100);
    std::vector<Point2> inflated;
    for (const auto& v : hull)
        for (int dx : {-1, 1})
            for (int dy : {-1, 1}) inflated.push_back({v.x + dx * eps, v.y + dy * eps});

    SimParams prm;
    prm.delta = 0.999;
    prm.horizon = 6000;
    prm.reps = 200;
    prm.seed = 555;
    for (long k : {2L, 3L}) {  // lambda = 1/3 and 1/2
        SubBlockSpec sp{1,
                        k == 2 ? family2({Rational(1, 3), Rational(2, 3)}, 0, Rational(3, 4))
                               : family2({Rational(1, 2), Rational(1, 2)}, 0, 1),
                        rule({0, 1})};
        auto rep = simulate(s, cf, canonical_profile(s, cf, BlockConfig::make({sp}, 600)), prm);
        Point2 payoff{Rational(rep.sender_disc_mean), Rational(rep.receiver_disc_mean)};
        CHECK(in_hull(payoff, inflated));
    }
}
