#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "safer/applications.hpp"
#include "safer/io.hpp"
#include "safer/oracle.hpp"
#include "safer/relation.hpp"
#include "safer/rng.hpp"
#include "test_support.hpp"

using namespace safer;
using Catch::Matchers::WithinAbs;

TEST_CASE("named securities have the exact piecewise form") {
    auto debt = make_debt(0.3);
    CHECK(debt.breakpoints == std::vector<double>{0.0, 0.3, 1.0});
    CHECK(debt.values == std::vector<double>{0.0, 0.3, 0.3});
    auto call = make_call(0.5);
    CHECK(call.breakpoints == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(call.values == std::vector<double>{0.0, 0.0, 0.5});
    auto equity = make_equity(0.5);
    CHECK_THAT(equity.at(0.4), WithinAbs(0.2, 1e-15));
    CHECK_THROWS(make_debt(0.0));
    CHECK_THROWS(make_equity(1.0));
}

TEST_CASE("security invariants are named on violation") {
    CHECK_THROWS_WITH(make_custom_security({0.0, 0.5, 1.0}, {0.0, 0.2, 0.8}),
                      Catch::Matchers::ContainsSubstring("Monotonicity II")); // slope 1.2
    CHECK_THROWS_WITH(make_custom_security({0.0, 0.5, 1.0}, {0.0, 0.4, 0.3}),
                      Catch::Matchers::ContainsSubstring("Monotonicity I"));
    CHECK_THROWS_WITH(make_custom_security({0.0, 1.0}, {0.1, 0.5}),
                      Catch::Matchers::ContainsSubstring("limited liability"));
    CHECK_THROWS(make_custom_security({0.0, 0.5}, {0.0, 0.2})); // must end at 1
}

TEST_CASE("security crossings via exact breakpoint arithmetic") {
    SECTION("equity crosses debt from below at d/eta") {
        auto v = security_crossing(make_debt(0.3), make_equity(0.5));
        REQUIRE(v.passed());
        REQUIRE(v.vbar.has_value());
        CHECK_THAT(*v.vbar, WithinAbs(0.6, 1e-12));
    }
    SECTION("call crosses debt from below at d + rho") {
        auto v = security_crossing(make_debt(0.3), make_call(0.5));
        REQUIRE(v.passed());
        CHECK_THAT(*v.vbar, WithinAbs(0.8, 1e-12));
    }
    SECTION("a security against itself crosses trivially") {
        auto v = security_crossing(make_debt(0.3), make_debt(0.3));
        REQUIRE(v.passed());
        CHECK(*v.vbar == 0.0);
    }
}

TEST_CASE("security safety on the worked pairs") {
    SECTION("debt is safer than equity") {
        auto v = security_safer(make_debt(0.3), make_equity(0.5));
        CHECK(v.relation == Relation::safer);
        REQUIRE(v.crossing.has_value());
        CHECK_THAT(*v.crossing, WithinAbs(0.6, 1e-12));
    }
    SECTION("equity is safer than the call at the same level") {
        auto v = security_safer(make_equity(0.5), make_call(0.5));
        CHECK(v.relation == Relation::safer);
        // the call never strictly beats this equity share: trivial relation
        CHECK(v.dominance == SecurityDominance::a_dominates);
    }
    SECTION("reversed debt/equity fails with a straddling witness") {
        auto v = security_safer(make_equity(0.5), make_debt(0.3));
        REQUIRE(v.relation == Relation::not_safer);
        REQUIRE(v.witness.has_value());
        CHECK(v.witness->first < 0.6);
        CHECK(v.witness->second > 0.6);
    }
}

TEST_CASE("debt is safest and calls least safe over a seeded corpus") {
    Rng rng(555);
    for (int i = 0; i < 40; ++i) {
        auto s = testing::random_security(rng);
        for (double level : {0.1, 0.5, 0.9}) {
            auto vd = security_safer(make_debt(level), s);
            CHECK(vd.relation == Relation::safer);
            auto vc = security_safer(s, make_call(level));
            CHECK(vc.relation == Relation::safer);
        }
    }
}

TEST_CASE("security safety agrees with the decision-problem test on grids") {
    struct Case {
        Security sa, sb;
    };
    const Case cases[] = {
        {make_debt(0.3), make_equity(0.5)},  {make_equity(0.5), make_debt(0.3)},
        {make_debt(0.62), make_call(0.34)},  {make_equity(0.7), make_call(0.4)},
        {make_custom_security({0, 0.5, 1}, {0, 0.25, 0.75}), make_equity(0.5)},
        {make_debt(0.41), make_custom_security({0, 0.3, 1}, {0, 0.3, 0.65})},
    };
    for (const auto& [sa, sb] : cases) {
        for (bool use_sqrt : {false, true}) {
            DecisionProblem p;
            p.actions = {"Sa", "Sb"};
            std::vector<double> pa, pb;
            for (int k = 0; k < 50; ++k) {
                const double theta = (k + 0.5) / 50.0;
                const double va = sa.at(theta), vb = sb.at(theta);
                if (std::fabs(va - vb) < 1e-9) continue; // keep the grid generic
                p.states.push_back("t" + std::to_string(k));
                pa.push_back(use_sqrt ? std::sqrt(va) : va);
                pb.push_back(use_sqrt ? std::sqrt(vb) : vb);
            }
            p.payoff = {pa, pb};
            p.validate();
            auto c = classify_states(p, "Sa", "Sb");
            if (c.set_A.empty() || c.set_B.empty()) continue; // dominated on this grid
            const bool grid_safer = is_safer(c).safer();
            const bool exact_safer = security_safer(sa, sb).relation == Relation::safer;
            CHECK(grid_safer == exact_safer);
        }
    }
}

TEST_CASE("first-order stochastic dominance on discrete distributions") {
    DiscreteDistribution p2{{2.0}, {1.0}}, p1{{1.0}, {1.0}};
    CHECK(fosd(p2, p1) == Fosd::F_dominates);
    CHECK(fosd(p1, p2) == Fosd::G_dominates);
    CHECK(fosd(p1, p1) == Fosd::equal);
    DiscreteDistribution f{{1.0, 3.0}, {0.5, 0.5}}, g{{1.0, 2.0}, {0.5, 0.5}};
    CHECK(fosd(f, g) == Fosd::F_dominates);
    DiscreteDistribution h{{0.0, 3.0}, {0.5, 0.5}};
    CHECK(fosd(h, p1) == Fosd::incomparable);
}

TEST_CASE("hedge conditions on the worked instances") {
    SECTION("all conditions hold") {
        HedgingInstance h{{"s0", "s1"},
                          {2.0, 1.5},
                          {1.0, 3.0},
                          {DiscreteDistribution{{1.0}, {1.0}}, DiscreteDistribution{{2.0}, {1.0}}}};
        auto r = hedge_check(h);
        CHECK(r.verdict == HedgeVerdict::hedges_better);
    }
    SECTION("payoff condition fails by name") {
        HedgingInstance h{{"s0", "s1"},
                          {3.0, 1.0},
                          {1.0, 2.0},
                          {DiscreteDistribution{{1.0}, {1.0}}, DiscreteDistribution{{2.0}, {1.0}}}};
        auto r = hedge_check(h);
        REQUIRE(r.verdict == HedgeVerdict::inconclusive);
        CHECK(*r.failed_condition == "v[theta'] >= w[theta]");
    }
    SECTION("stochastic dominance fails when the wealth CDFs cross") {
        HedgingInstance h{{"s0", "s1"},
                          {2.0, 1.5},
                          {1.0, 3.0},
                          {DiscreteDistribution{{0.0, 3.0}, {0.5, 0.5}},
                           DiscreteDistribution{{1.0}, {1.0}}}};
        auto r = hedge_check(h);
        REQUIRE(r.verdict == HedgeVerdict::inconclusive);
        CHECK(*r.failed_condition == "H[theta'] first-order dominates H[theta]");
    }
}

TEST_CASE("a passing hedge instance satisfies the robustness implication") {
    HedgingInstance h{{"s0", "s1"},
                      {2.0, 1.5},
                      {1.0, 3.0},
                      {DiscreteDistribution{{0.5, 1.5}, {0.5, 0.5}},
                       DiscreteDistribution{{2.0, 3.0}, {0.5, 0.5}}}};
    REQUIRE(hedge_check(h).verdict == HedgeVerdict::hedges_better);
    // expected utility of holding asset plus wealth, per state
    auto state_util = [&](const ConcaveTransform& u, double pay, const DiscreteDistribution& w) {
        double e = 0.0;
        for (std::size_t i = 0; i < w.values.size(); ++i) e += w.probs[i] * u(pay + w.values[i]);
        return e;
    };
    for (std::uint64_t t = 0; t < 40; ++t) {
        auto u = sample_concave(9000 + t, 0.5, 5.0, 1 + t % 3);
        for (int k = 0; k <= 50; ++k) {
            const double x1 = k / 50.0;
            double eu_a = 0, eu_b = 0, e_a = 0, e_b = 0;
            for (std::size_t s = 0; s < 2; ++s) {
                const double w = s == 0 ? 1.0 - x1 : x1;
                eu_a += w * state_util(u, h.asset_a[s], h.wealth[s]);
                eu_b += w * state_util(u, h.asset_b[s], h.wealth[s]);
                e_a += w * (h.asset_a[s] + h.wealth[s].mean());
                e_b += w * (h.asset_b[s] + h.wealth[s].mean());
            }
            if (e_a >= e_b) CHECK(eu_a >= eu_b - 1e-9);
        }
    }
}

TEST_CASE("coordination game safety and risk dominance") {
    SECTION("both hold") {
        auto r = game_safety(CoordinationGame{3, 2, 1, 4});
        CHECK(r.aa_safe);
        CHECK(r.aa_risk_dominant);
        CHECK_FALSE(r.safety_risk_divergence);
    }
    SECTION("risk dominant but not safe") {
        auto r = game_safety(CoordinationGame{5, 2, 1, 4});
        CHECK_FALSE(r.aa_safe);
        CHECK(r.aa_risk_dominant);
        CHECK(r.safety_risk_divergence);
    }
    SECTION("symmetric game: both profiles safe") {
        auto r = game_safety(CoordinationGame{3, 1, 1, 3});
        CHECK(r.aa_safe);
        CHECK(r.bb_safe);
    }
    SECTION("invariants enforced") {
        CHECK_THROWS(game_safety(CoordinationGame{1, 2, 3, 4})); // alpha1 <= beta1
    }
}

TEST_CASE("game safety equals the two-state safety of the induced problem") {
    Rng rng(606);
    for (int i = 0; i < 300; ++i) {
        double a1 = rng.uniform(0, 10), b1 = rng.uniform(0, 10);
        if (a1 <= b1) std::swap(a1, b1);
        double b2 = rng.uniform(0, 10), a2 = rng.uniform(0, 10);
        if (b2 <= a2) std::swap(b2, a2);
        if (a1 == b1 || b2 == a2) continue;
        CoordinationGame g{a1, a2, b1, b2};
        auto r = game_safety(g);
        auto p = game_as_decision_problem(g);
        auto v = is_safer_two_state(classify_states(p, "a", "b"));
        CHECK(r.aa_safe == v.safer());
        auto w = is_safer_two_state(classify_states(p, "b", "a"));
        CHECK(r.bb_safe == w.safer());
    }
}

TEST_CASE("application file formats parse and round-trip") {
    SECTION("securities by kind or by explicit breakpoints") {
        auto s = parse_security(json::parse(R"({"kind": "debt", "param": 0.3})"));
        CHECK(s.values == std::vector<double>{0.0, 0.3, 0.3});
        auto t = parse_security(
            json::parse(R"({"breakpoints": [0, 0.5, 1], "values": [0, 0.25, 0.75]})"));
        CHECK_THAT(t.at(0.75), WithinAbs(0.5, 1e-15));
        CHECK_THROWS(parse_security(json::parse(R"({"kind": "swap", "param": 0.3})")));
        auto round = parse_security(security_to_json(t));
        CHECK(round.breakpoints == t.breakpoints);
        CHECK(round.values == t.values);
    }
    SECTION("hedging instances") {
        auto h = parse_hedging(R"({"states": ["s0","s1"],
            "asset_a": [2, 1.5], "asset_b": [1, 3],
            "wealth": [{"values": [1], "probs": [1]}, {"values": [2], "probs": [1]}]})");
        CHECK(h.asset_a == std::vector<double>{2.0, 1.5});
        CHECK(hedge_check(h).verdict == HedgeVerdict::hedges_better);
        CHECK_THROWS(parse_hedging(R"({"states": ["s0"], "asset_a": [1]})"));
    }
    SECTION("games") {
        auto g = parse_game(R"({"alpha1": 3, "beta1": 1, "alpha2": 2, "beta2": 4})");
        CHECK(game_safety(g).aa_safe);
        CHECK_THROWS(parse_game(R"({"alpha1": 1, "beta1": 3, "alpha2": 2, "beta2": 4})"));
    }
    SECTION("certificates") {
        auto p = []() {
            DecisionProblem q;
            q.states = {"s0", "s1"};
            q.actions = {"a", "b"};
            q.payoff = {{5, 3}, {1, 4}};
            return q;
        }();
        auto c = classify_states(p, "a", "b");
        auto cert = construct_violation(c);
        auto round = certificate_from_json(certificate_to_json(cert));
        CHECK(round.belief.weights == cert.belief.weights);
        CHECK(round.transform.describe() == cert.transform.describe());
        CHECK(verify_certificate(c, round));
    }
}

TEST_CASE("quadratic problems on the worked grids") {
    const std::vector<double> actions{0.2, 0.5};
    const std::vector<double> states{0.0, 0.3, 0.4, 1.0};
    SECTION("plain variant cannot rank the pair") {
        auto p = quadratic_problem(QuadraticVariant::plain, actions, states);
        CHECK(p.actions == std::vector<std::string>{"0.2", "0.5"});
        CHECK_THAT(p.payoff[0][1], WithinAbs(0.99, 1e-15));
        CHECK_FALSE(is_safer(classify_states(p, "0.2", "0.5")).safer());
        CHECK_FALSE(is_safer(classify_states(p, "0.5", "0.2")).safer());
    }
    SECTION("tweaked variant ranks lower actions safer") {
        auto p = quadratic_problem(QuadraticVariant::tweaked, actions, states);
        CHECK(is_safer(classify_states(p, "0.2", "0.5")).safer());
        CHECK_FALSE(is_safer(classify_states(p, "0.5", "0.2")).safer());
    }
    SECTION("midpoint on the state grid is refused by name") {
        CHECK_THROWS_WITH(
            quadratic_problem(QuadraticVariant::plain, actions, {0.0, 0.35, 1.0}),
            Catch::Matchers::ContainsSubstring("0.35"));
    }
    SECTION("single-grid form uses the grid for both axes") {
        auto p = quadratic_problem(QuadraticVariant::plain, {0.1, 0.4, 0.85});
        CHECK(p.n_states() == 3);
        CHECK(p.n_actions() == 3);
    }
}
