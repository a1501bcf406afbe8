#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safer/core.hpp"
#include "safer/rng.hpp"

namespace safer {

/// Distribution over utils induced by a belief: sorted distinct support,
/// nondecreasing cumulative probabilities ending at 1.
struct DiscreteCDF {
    std::vector<double> support;
    std::vector<double> cum;

    double at(double v) const {
        double c = 0.0;
        for (std::size_t i = 0; i < support.size() && support[i] <= v; ++i) c = cum[i];
        return c;
    }
};

inline DiscreteCDF induced_cdf(const DecisionProblem& p, std::size_t action, const Belief& x) {
    if (x.weights.size() != p.n_states()) throw Error("belief length does not equal state count");
    std::map<double, double> mass;
    for (std::size_t s = 0; s < p.n_states(); ++s) mass[p.payoff[action][s]] += x.weights[s];
    DiscreteCDF f;
    double c = 0.0;
    for (auto& [v, m] : mass) {
        c += m;
        f.support.push_back(v);
        f.cum.push_back(c);
    }
    return f;
}

inline DiscreteCDF induced_cdf(const DecisionProblem& p, const std::string& action,
                               const Belief& x) {
    return induced_cdf(p, p.action_index(action), x);
}

enum class Crossing { single_cross_from_below, fails };

/// Outcome of the single-crossing test. On success, vbar is the smallest
/// merged-support value v such that F_a - F_b is nonpositive strictly below
/// v and nonnegative from v on (tolerance-zeros neutral). On failure,
/// violation holds utils v1 < v2 with D(v1) > 0 and D(v2) < 0.
struct CrossingVerdict {
    Crossing crosses = Crossing::fails;
    std::optional<double> vbar;
    std::optional<std::pair<double, double>> violation;

    bool passed() const { return crosses == Crossing::single_cross_from_below; }
};

/// Does F_a single-cross F_b from below? Evaluates D = F_a - F_b on the
/// merged support; the step functions are constant in between, so the
/// pattern there decides the relation everywhere.
inline CrossingVerdict single_cross_test(const DiscreteCDF& fa, const DiscreteCDF& fb,
                                         const Tolerance& tol = {}) {
    std::vector<double> merged;
    merged.reserve(fa.support.size() + fb.support.size());
    std::merge(fa.support.begin(), fa.support.end(), fb.support.begin(), fb.support.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::vector<double> d(merged.size());
    {
        std::size_t ia = 0, ib = 0;
        double ca = 0.0, cb = 0.0;
        for (std::size_t k = 0; k < merged.size(); ++k) {
            while (ia < fa.support.size() && fa.support[ia] <= merged[k]) ca = fa.cum[ia++];
            while (ib < fb.support.size() && fb.support[ib] <= merged[k]) cb = fb.cum[ib++];
            d[k] = ca - cb;
        }
    }

    auto sign = [&](double v) { return tol.tied(v, 0.0) ? 0 : (v > 0.0 ? 1 : -1); };

    CrossingVerdict out;
    std::optional<std::size_t> last_pos;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const int s = sign(d[k]);
        if (s > 0) last_pos = k;
        if (s < 0 && last_pos) {
            out.crosses = Crossing::fails;
            out.violation = std::make_pair(merged[*last_pos], merged[k]);
            return out;
        }
    }
    out.crosses = Crossing::single_cross_from_below;
    // Smallest admissible threshold: everything strictly before it
    // nonpositive, everything from it on nonnegative.
    std::size_t k = merged.size();
    while (k > 0 && sign(d[k - 1]) >= 0) --k;
    out.vbar = merged.empty() ? 0.0 : merged[std::min(k, merged.size() - 1)];
    return out;
}

/// Plain belief grids sized per state count: an even subdivision for two
/// states, a triangular barycentric grid for three, flat-Dirichlet samples
/// beyond that. Deterministic in (count, seed).
inline std::vector<Belief> belief_grid(std::size_t n_states, std::size_t count,
                                       std::uint64_t seed = 42) {
    std::vector<Belief> out;
    if (n_states < 2 || count == 0) return out;
    if (n_states == 2) {
        const std::size_t m = std::max<std::size_t>(count, 2);
        for (std::size_t i = 0; i < m; ++i) {
            const double w = static_cast<double>(i) / static_cast<double>(m - 1);
            out.push_back(Belief{{1.0 - w, w}});
        }
        return out;
    }
    if (n_states == 3) {
        // resolution r gives (r+1)(r+2)/2 points; pick r to approximate count
        std::size_t r = 1;
        while ((r + 1) * (r + 2) / 2 < count) ++r;
        for (std::size_t i = 0; i <= r; ++i)
            for (std::size_t j = 0; j + i <= r; ++j) {
                const double x1 = static_cast<double>(i) / static_cast<double>(r);
                const double x2 = static_cast<double>(j) / static_cast<double>(r);
                out.push_back(Belief{{1.0 - x1 - x2, x1, x2}});
            }
        return out;
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) out.push_back(Belief{rng.dirichlet(n_states)});
    return out;
}

/// Default grid sizes: 201 points for 2 states, the 101-per-edge triangular
/// grid (5151 points) for 3, 20000 Dirichlet samples for 4 or more.
inline std::size_t default_grid_size(std::size_t n_states) {
    if (n_states <= 2) return 201;
    if (n_states == 3) return 5151;
    return 20000;
}

/// Belief on the edge between two states with the given weight on the
/// second; exact zeros elsewhere.
inline Belief edge_belief(std::size_t n_states, std::size_t theta, std::size_t theta_prime,
                          double lambda) {
    std::vector<double> w(n_states, 0.0);
    w[theta] = 1.0 - lambda;
    w[theta_prime] = lambda;
    return Belief{std::move(w)};
}

/// Weight on theta_prime at which the two actions break even on the edge
/// (theta in A, theta' in B).
inline double edge_indifference_weight(const PairClassification& c, std::size_t theta,
                                       std::size_t theta_prime) {
    const double ga = c.alpha[theta] - c.beta[theta];
    const double gb = c.beta[theta_prime] - c.alpha[theta_prime];
    return ga / (ga + gb);
}

/// Appends every edge indifference point plus small perturbations along the
/// edge. Single-crossing violations concentrate there, which makes the
/// finite check decisive on generic instances.
inline void augment_with_edge_points(std::vector<Belief>& beliefs, const PairClassification& c,
                                     double eps = 1e-3) {
    for (auto th : c.set_A)
        for (auto tp : c.set_B) {
            const double lam = edge_indifference_weight(c, th, tp);
            const double up = lam + eps < 1.0 ? lam + eps : (lam + 1.0) / 2.0;
            const double dn = lam - eps > 0.0 ? lam - eps : lam / 2.0;
            for (double l : {lam, up, dn})
                beliefs.push_back(edge_belief(c.n_states(), th, tp, l));
        }
}

/// Default belief list for the robust test: plain grid plus edge-point
/// augmentation.
inline std::vector<Belief> default_belief_grid(const PairClassification& c,
                                               std::uint64_t seed = 42) {
    auto beliefs = belief_grid(c.n_states(), default_grid_size(c.n_states()), seed);
    augment_with_edge_points(beliefs, c);
    return beliefs;
}

struct RobustCrossingReport {
    bool pass = true;
    std::size_t beliefs_checked = 0;
    std::optional<Belief> failing_belief;
    std::optional<CrossingVerdict> failing_verdict;
};

/// Runs the single-crossing test at every supplied belief. Passing is
/// grid-relative: the quantifier "for all beliefs" has no finite
/// certificate, so a pass is evidence aligned with the payoff-condition
/// test, not an exhaustive proof.
inline RobustCrossingReport robust_single_cross(const PairClassification& c,
                                                const std::vector<Belief>& beliefs,
                                                const Tolerance& tol = {}) {
    require_generic(c);
    if (beliefs.empty()) throw Error("robust_single_cross needs at least one belief");
    DecisionProblem pair;
    pair.states = c.state_labels;
    pair.actions = {c.action_a, c.action_b};
    pair.payoff = {c.alpha, c.beta};

    RobustCrossingReport r;
    for (const auto& x : beliefs) {
        auto fa = induced_cdf(pair, std::size_t{0}, x);
        auto fb = induced_cdf(pair, std::size_t{1}, x);
        auto verdict = single_cross_test(fa, fb, tol);
        ++r.beliefs_checked;
        if (!verdict.passed()) {
            r.pass = false;
            r.failing_belief = x;
            r.failing_verdict = verdict;
            return r;
        }
    }
    return r;
}

inline RobustCrossingReport robust_single_cross_default(const PairClassification& c,
                                                        std::uint64_t seed = 42,
                                                        const Tolerance& tol = {}) {
    return robust_single_cross(c, default_belief_grid(c, seed), tol);
}

} // namespace safer
