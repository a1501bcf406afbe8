#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "safer/crossing.hpp"
#include "safer/oracle.hpp"
#include "safer/relation.hpp"
#include "safer/rng.hpp"

using namespace safer;
using Catch::Matchers::WithinAbs;

namespace {

DecisionProblem two_action(std::vector<double> a, std::vector<double> b) {
    DecisionProblem p;
    for (std::size_t s = 0; s < a.size(); ++s) p.states.push_back("s" + std::to_string(s));
    p.actions = {"a", "b"};
    p.payoff = {std::move(a), std::move(b)};
    p.validate();
    return p;
}

} // namespace

TEST_CASE("induced_cdf aggregates belief mass by util value") {
    SECTION("two states") {
        auto p = two_action({3, 2}, {1, 4});
        auto f = induced_cdf(p, "a", Belief{{0.25, 0.75}});
        CHECK(f.support == std::vector<double>{2, 3});
        CHECK_THAT(f.cum[0], WithinAbs(0.75, 1e-15));
        CHECK_THAT(f.cum[1], WithinAbs(1.0, 1e-15));
    }
    SECTION("risk-free action gives a point mass") {
        auto p = two_action({2, 2, 2}, {0, 4, 1});
        auto f = induced_cdf(p, "a", Belief{{0.2, 0.3, 0.5}});
        CHECK(f.support == std::vector<double>{2});
        CHECK_THAT(f.cum[0], WithinAbs(1.0, 1e-15));
    }
    SECTION("duplicate utils merge their mass") {
        auto p = two_action({3, 2, 2}, {1, 4, 4});
        auto f = induced_cdf(p, "a", Belief{{0.2, 0.3, 0.5}});
        CHECK(f.support == std::vector<double>{2, 3});
        CHECK_THAT(f.cum[0], WithinAbs(0.8, 1e-15));
        CHECK_THAT(f.cum[1], WithinAbs(1.0, 1e-15));
    }
}

TEST_CASE("induced_cdf mass accumulates to one") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.index(5);
        std::vector<double> a;
        for (std::size_t s = 0; s < n; ++s) a.push_back(rng.uniform(0, 10));
        auto p = two_action(a, std::vector<double>(n, 1.0));
        auto x = Belief{Rng(trial).dirichlet(n)};
        auto f = induced_cdf(p, std::size_t{0}, x);
        REQUIRE(!f.cum.empty());
        CHECK_THAT(f.cum.back(), WithinAbs(1.0, n * 1e-15));
        for (std::size_t i = 1; i < f.cum.size(); ++i) {
            CHECK(f.cum[i] >= f.cum[i - 1]);
            CHECK(f.support[i] > f.support[i - 1]);
        }
    }
}

TEST_CASE("single-crossing sign patterns on the worked beliefs") {
    SECTION("crossing from below, smallest threshold reported") {
        auto p = two_action({3, 2}, {1, 4});
        Belief x{{0.5, 0.5}};
        auto v = single_cross_test(induced_cdf(p, "a", x), induced_cdf(p, "b", x));
        REQUIRE(v.passed());
        REQUIRE(v.vbar.has_value());
        CHECK(*v.vbar == 2.0);
    }
    SECTION("sign pattern -,+,- fails with the violating utils") {
        auto p = two_action({5, 3}, {1, 4});
        Belief x{{0.25, 0.75}};
        auto v = single_cross_test(induced_cdf(p, "a", x), induced_cdf(p, "b", x));
        REQUIRE_FALSE(v.passed());
        REQUIRE(v.violation.has_value());
        CHECK(v.violation->first == 3.0);
        CHECK(v.violation->second == 4.0);
    }
    SECTION("first-order dominance passes with the threshold at the top") {
        DiscreteCDF fa{{2.0}, {1.0}}; // the better lottery: F_a <= F_b pointwise
        DiscreteCDF fb{{1.0}, {1.0}};
        auto v = single_cross_test(fa, fb);
        REQUIRE(v.passed());
        CHECK(*v.vbar == 2.0); // max of the merged support
        // the reversed pair also single-crosses, trivially from the far left
        auto w = single_cross_test(fb, fa);
        REQUIRE(w.passed());
        CHECK(*w.vbar == 1.0);
    }
}

TEST_CASE("default grids have the documented sizes and augmentation") {
    CHECK(default_grid_size(2) == 201);
    CHECK(default_grid_size(3) == 5151);
    CHECK(default_grid_size(5) == 20000);
    CHECK(belief_grid(2, 201).size() == 201);
    CHECK(belief_grid(3, 5151).size() == 5151);
    CHECK(belief_grid(4, 100, 7).size() == 100);

    auto c = classify_states(two_action({3, 2, 2}, {1, 4, 4}), "a", "b");
    auto grid = default_belief_grid(c);
    CHECK(grid.size() == 5151 + 3 * 2); // two (A,B) edges, three points each

    // Dirichlet samples are valid beliefs and deterministic in seed
    auto g1 = belief_grid(4, 50, 9), g2 = belief_grid(4, 50, 9);
    for (std::size_t i = 0; i < g1.size(); ++i) {
        CHECK(g1[i].weights == g2[i].weights);
        double sum = 0;
        for (double w : g1[i].weights) {
            CHECK(w >= 0);
            sum += w;
        }
        CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("robust single-crossing on the worked pairs") {
    SECTION("safer pair passes the default grid") {
        auto c = classify_states(two_action({3, 2, 2}, {1, 4, 4}), "a", "b");
        auto r = robust_single_cross(c, default_belief_grid(c));
        CHECK(r.pass);
        CHECK(r.beliefs_checked == 5151 + 6);
    }
    SECTION("non-safer pair fails at a belief past the half point") {
        auto c = classify_states(two_action({5, 3}, {1, 4}), "a", "b");
        auto r = robust_single_cross(c, default_belief_grid(c));
        REQUIRE_FALSE(r.pass);
        REQUIRE(r.failing_belief.has_value());
        CHECK(r.failing_belief->weights[1] > 0.5);
    }
    SECTION("a single vertex belief passes trivially") {
        auto c = classify_states(two_action({5, 3}, {1, 4}), "a", "b");
        auto r = robust_single_cross(c, {Belief{{1.0, 0.0}}});
        CHECK(r.pass);
    }
}

TEST_CASE("single-crossing certifies robustness belief by belief") {
    // wherever the crossing test passes and the belief prefers a, every
    // concave transform keeps preferring a
    Rng rng(97);
    int implications = 0;
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.index(3);
        std::vector<double> a, b;
        for (std::size_t s = 0; s < n; ++s) {
            a.push_back(rng.uniform(0, 10));
            b.push_back(rng.uniform(0, 10));
        }
        auto p = two_action(a, b);
        auto c = classify_states(p, "a", "b");
        if (!c.degenerate.empty() || c.set_A.empty() || c.set_B.empty()) continue;
        for (int bi = 0; bi < 40; ++bi) {
            Belief x{Rng(trial * 101 + bi).dirichlet(n)};
            auto verdict = single_cross_test(induced_cdf(p, "a", x), induced_cdf(p, "b", x));
            if (!verdict.passed()) continue;
            const double eu_a = expected_payoff(c.alpha, x);
            const double eu_b = expected_payoff(c.beta, x);
            if (eu_a < eu_b) continue;
            for (std::uint64_t t = 0; t < 20; ++t) {
                auto phi = sample_concave(40000 + t, 0.0, 10.0, 1 + t % 4);
                double da = 0.0;
                for (std::size_t s = 0; s < n; ++s)
                    da += x.weights[s] * (phi(c.alpha[s]) - phi(c.beta[s]));
                CHECK(da >= -1e-9);
                ++implications;
            }
        }
    }
    CHECK(implications > 2000);
}

TEST_CASE("payoff conditions and grid-level single-crossing agree") {
    Rng rng(83);
    int checked = 0;
    while (checked < 60) {
        const std::size_t n = 2 + rng.index(3);
        std::vector<double> a, b;
        for (std::size_t s = 0; s < n; ++s) {
            a.push_back(rng.uniform(0, 10));
            b.push_back(rng.uniform(0, 10));
        }
        auto c = classify_states(two_action(a, b), "a", "b");
        if (!c.degenerate.empty() || c.set_A.empty() || c.set_B.empty()) continue;
        ++checked;
        // light grid keeps the unit suite fast; the acceptance suite runs the
        // full default resolution
        auto grid = belief_grid(n, n == 2 ? 101 : 500, 5);
        augment_with_edge_points(grid, c);
        auto r = robust_single_cross(c, grid);
        CHECK(r.pass == is_safer(c).safer());
    }
}
