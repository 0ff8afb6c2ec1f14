#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "persuasion/acceptance.hpp"
#include "persuasion/envelopes.hpp"

#include <random>

using namespace persuasion;

namespace {

// brute-force concavification over pairs drawn from breakpoints and simplex
// vertices; independent of the LP path
Rational cav_pairs_oracle(const Scenario& s, const Rational& pi) {
    std::vector<Rational> xs = {0, 1};
    for (const auto& b : br_breakpoints(s)) xs.push_back(b);
    xs.push_back(pi);
    Rational best = indirect_utility(s, Belief::binary(pi));
    for (const auto& x : xs) {
        for (const auto& y : xs) {
            if (x == y || !(x <= pi && pi <= y)) continue;
            Rational wy = (pi - x) / (y - x);
            Rational v = (1 - wy) * indirect_utility(s, Belief::binary(x)) +
                         wy * indirect_utility(s, Belief::binary(y));
            best = std::max(best, v);
        }
    }
    return best;
}

void check_split(const Scenario& s, const Belief& pi, const CavResult& r) {
    Rational wsum = 0;
    RatVec mean(pi.size(), 0);
    Rational value = 0;
    for (std::size_t j = 0; j < r.split.weights.size(); ++j) {
        CHECK(r.split.weights[j] > 0);
        wsum += r.split.weights[j];
        for (int w = 0; w < pi.size(); ++w)
            mean[w] += r.split.weights[j] * r.split.posteriors[j][w];
        value += r.split.weights[j] * indirect_utility(s, r.split.posteriors[j]);
    }
    CHECK(wsum == 1);
    CHECK(mean == pi.p);
    CHECK(value == r.value);
}

Scenario three_state_scenario() {
    Scenario s;
    s.states = {"x", "y", "z"};
    s.messages = {"m1", "m2", "m3"};
    s.actions = {"a1", "a2", "a3"};
    s.u_S = {{3, 0, 1}, {0, 2, 1}, {0, 0, 4}};
    s.u_R = {{2, 0, 1}, {0, 2, 1}, {0, 0, 2}};
    RatVec row = {Rational(1, 3), Rational(1, 3), Rational(1, 3)};
    s.Q = {row, row, row};
    return s;
}

}  // namespace

TEST_CASE("persuasion value of the advisory game") {
    Scenario s = bundled_scenario("example1");
    auto r = cav_u(s, Belief::binary(Rational(1, 2)));
    CHECK(r.exact);
    CHECK(r.value == Rational(5, 3));
    REQUIRE(r.split.weights.size() == 2);
    CHECK(r.split.posteriors[0].second() == 0);
    CHECK(r.split.weights[0] == Rational(1, 3));
    CHECK(r.split.posteriors[1].second() == Rational(3, 4));
    CHECK(r.split.weights[1] == Rational(2, 3));
    check_split(s, Belief::binary(Rational(1, 2)), r);
}

TEST_CASE("no splitting at a degenerate prior") {
    Scenario s = bundled_scenario("example1");
    auto r = cav_u(s, Belief::binary(0));
    CHECK(r.value == 1);
    check_split(s, Belief::binary(0), r);
}

TEST_CASE("persuasion value of the four-action game") {
    Scenario s = bundled_scenario("example2");
    Rational pi(1, 2);
    auto r = cav_u(s, Belief::binary(pi));
    CHECK(r.value == cav_pairs_oracle(s, pi));
    CHECK(r.value == 1);
    REQUIRE(r.split.weights.size() == 2);
    CHECK(r.split.posteriors[0].second() == 0);
    CHECK(r.split.posteriors[1].second() == 1);
    CHECK(r.split.weights[0] == Rational(1, 2));
    check_split(s, Belief::binary(pi), r);
}

TEST_CASE("cheap-talk envelope of the advisory game") {
    Scenario s = bundled_scenario("example1");
    CHECK(quasicav_u(s, Belief::binary(Rational(1, 2))) == 1);
    CHECK(quasicav_u(s, Belief::binary(Rational(4, 5))) == 2);
}

TEST_CASE("constant indirect utility is its own envelope") {
    Scenario s = bundled_scenario("example1");
    s.u_S = {{5, 5, 5}, {5, 5, 5}};
    for (int k = 0; k <= 4; ++k) {
        Belief pi = Belief::binary(Rational(k, 4));
        CHECK(quasicav_u(s, pi) == 5);
        CHECK(cav_u(s, pi).value == 5);
    }
}

TEST_CASE("sandwich between indirect utility and the persuasion value") {
    std::mt19937 gen(17);
    std::uniform_int_distribution<int> num(0, 24);
    for (const char* name : {"example1", "example2"}) {
        Scenario s = bundled_scenario(name);
        for (int i = 0; i < 30; ++i) {
            Belief pi = Belief::binary(Rational(num(gen), 24));
            Rational base = indirect_utility(s, pi);
            Rational qc = quasicav_u(s, pi);
            Rational cv = cav_u(s, pi).value;
            CHECK(base <= qc);
            CHECK(qc <= cv);
        }
    }
}

TEST_CASE("concavity along belief segments") {
    std::mt19937 gen(23);
    std::uniform_int_distribution<int> num(0, 16);
    Scenario s = bundled_scenario("example2");
    for (int i = 0; i < 20; ++i) {
        Rational p1(num(gen), 16), p2(num(gen), 16);
        for (int t : {1, 2, 3}) {
            Rational theta(t, 4);
            Rational mid = theta * p1 + (1 - theta) * p2;
            Rational lhs = cav_u(s, Belief::binary(mid)).value;
            Rational rhs = theta * cav_u(s, Belief::binary(p1)).value +
                           (1 - theta) * cav_u(s, Belief::binary(p2)).value;
            CHECK(lhs >= rhs);
        }
    }
}

TEST_CASE("grid fallback is monotone under refinement") {
    Scenario s = three_state_scenario();
    validate_scenario(s);
    Belief pi({Rational(1, 2), Rational(1, 4), Rational(1, 4)});
    Rational prev = -1;
    for (long d : {4L, 8L, 16L}) {
        auto r = cav_u(s, pi, d);
        CHECK_FALSE(r.exact);
        CHECK(r.value >= prev);
        CHECK(r.value >= indirect_utility(s, pi));
        check_split(s, pi, r);
        prev = r.value;
    }
}

TEST_CASE("quasicav of a state-dependent sender follows the side maxima") {
    // one region with utility line 1-2p, one with the constant 1/5; the
    // envelope at p is min(max over [0,p], max over [p,1]) in one dimension
    Scenario s;
    s.states = {"w1", "w2"};
    s.messages = {"m1", "m2"};
    s.actions = {"b1", "b2"};
    s.u_S = {{1, Rational(1, 5)}, {-1, Rational(1, 5)}};
    s.u_R = {{1, 0}, {0, 1}};
    s.Q = {{Rational(1, 2), Rational(1, 2)}, {Rational(1, 2), Rational(1, 2)}};
    validate_scenario(s);
    REQUIRE(br_breakpoints(s) == std::vector<Rational>{Rational(1, 2)});

    CHECK(quasicav_u(s, Belief::binary(Rational(3, 10))) == Rational(2, 5));  // 1 - 2p binds
    CHECK(quasicav_u(s, Belief::binary(Rational(1, 10))) == Rational(4, 5));
    CHECK(quasicav_u(s, Belief::binary(Rational(1, 2))) == Rational(1, 5));
    CHECK(quasicav_u(s, Belief::binary(Rational(9, 10))) == Rational(1, 5));
    CHECK(quasicav_u(s, Belief::binary(0)) == 1);
    // the envelope majorizes the utility and stays below the concave one
    for (int k = 0; k <= 10; ++k) {
        Belief p = Belief::binary(Rational(k, 10));
        CHECK(quasicav_u(s, p) >= indirect_utility(s, p));
        CHECK(quasicav_u(s, p) <= cav_u(s, p).value);
    }
}

TEST_CASE("quasicav rejects non-binary scenarios") {
    CHECK_THROWS_AS(quasicav_u(three_state_scenario(),
                               Belief({Rational(1, 3), Rational(1, 3), Rational(1, 3)})),
                    std::invalid_argument);
}
