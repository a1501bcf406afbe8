#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safer/core.hpp"
#include "safer/crossing.hpp"
#include "safer/relation.hpp"

namespace safer {

// ---------------------------------------------------------------------------
// Securities
// ---------------------------------------------------------------------------

/// A state-contingent security on cash flows [0,1]: piecewise linear between
/// breakpoints, nondecreasing (Monotonicity I), with the firm's residual
/// theta - S(theta) also nondecreasing (Monotonicity II), and 0 <= S <= theta
/// (limited liability). Every segment slope therefore lies in [0,1].
struct Security {
    std::vector<double> breakpoints; // increasing, first 0, last 1
    std::vector<double> values;      // S at each breakpoint

    double at(double theta) const {
        if (theta <= breakpoints.front()) return values.front();
        for (std::size_t i = 1; i < breakpoints.size(); ++i) {
            if (theta <= breakpoints[i]) {
                const double t0 = breakpoints[i - 1], t1 = breakpoints[i];
                const double w = (theta - t0) / (t1 - t0);
                return values[i - 1] + w * (values[i] - values[i - 1]);
            }
        }
        return values.back();
    }
};

namespace detail {

constexpr double kSecurityEps = 1e-12;

inline void validate_security(const Security& s) {
    if (s.breakpoints.size() < 2 || s.breakpoints.size() != s.values.size())
        throw Error("security needs matching breakpoint and value lists (>= 2 points)");
    if (s.breakpoints.front() != 0.0 || s.breakpoints.back() != 1.0)
        throw Error("security breakpoints must start at 0 and end at 1");
    for (std::size_t i = 1; i < s.breakpoints.size(); ++i)
        if (!(s.breakpoints[i] > s.breakpoints[i - 1]))
            throw Error("security breakpoints must be strictly increasing");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] < -kSecurityEps || s.values[i] > s.breakpoints[i] + kSecurityEps)
            throw Error("limited liability violated: 0 <= S(theta) <= theta");
    }
    for (std::size_t i = 1; i < s.breakpoints.size(); ++i) {
        const double slope =
            (s.values[i] - s.values[i - 1]) / (s.breakpoints[i] - s.breakpoints[i - 1]);
        if (slope < -kSecurityEps) throw Error("Monotonicity I violated: S must be nondecreasing");
        if (slope > 1.0 + kSecurityEps)
            throw Error("Monotonicity II violated: theta - S must be nondecreasing");
    }
}

} // namespace detail

inline Security make_equity(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw Error("equity share must lie in (0,1)");
    return Security{{0.0, 1.0}, {0.0, eta}};
}

inline Security make_debt(double d) {
    if (!(d > 0.0 && d < 1.0)) throw Error("debt level must lie in (0,1)");
    return Security{{0.0, d, 1.0}, {0.0, d, d}};
}

inline Security make_call(double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw Error("strike must lie in (0,1)");
    return Security{{0.0, rho, 1.0}, {0.0, 0.0, 1.0 - rho}};
}

inline Security make_custom_security(std::vector<double> breakpoints, std::vector<double> values) {
    Security s{std::move(breakpoints), std::move(values)};
    detail::validate_security(s);
    return s;
}

/// Exact sign analysis of S_b - S_a over the union of breakpoints. The
/// difference is piecewise linear, so its sign pattern is decided at the
/// merged breakpoints; interior roots are recovered by linear interpolation.
/// Verdict: does S_b single-cross S_a from below (nonpositive, then
/// nonnegative, in cash flows)?
inline CrossingVerdict security_crossing(const Security& sa, const Security& sb) {
    detail::validate_security(sa);
    detail::validate_security(sb);
    std::vector<double> grid;
    std::merge(sa.breakpoints.begin(), sa.breakpoints.end(), sb.breakpoints.begin(),
               sb.breakpoints.end(), std::back_inserter(grid));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const double eps = detail::kSecurityEps;
    std::vector<double> d(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) d[i] = sb.at(grid[i]) - sa.at(grid[i]);
    auto sign = [&](double v) { return std::fabs(v) <= eps ? 0 : (v > 0.0 ? 1 : -1); };

    CrossingVerdict out;
    std::optional<std::size_t> last_pos;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int s = sign(d[i]);
        if (s > 0) last_pos = i;
        if (s < 0 && last_pos) {
            out.crosses = Crossing::fails;
            out.violation = std::make_pair(grid[*last_pos], grid[i]);
            return out;
        }
    }
    out.crosses = Crossing::single_cross_from_below;
    // Crossing location: smallest theta from which the difference stays
    // nonnegative. Unbounded (no finite threshold) when S_a dominates.
    std::size_t k = grid.size();
    while (k > 0 && sign(d[k - 1]) >= 0) --k;
    if (k == 0) {
        out.vbar = 0.0;
    } else if (k == grid.size()) {
        out.vbar = std::numeric_limits<double>::infinity();
    } else {
        // d[k-1] < 0 <= d[k]; exact root on the linear piece between them
        const double t0 = grid[k - 1], t1 = grid[k];
        out.vbar = t0 + (-d[k - 1]) / (d[k] - d[k - 1]) * (t1 - t0);
    }
    return out;
}

enum class SecurityDominance { none, a_dominates, b_dominates, identical };

struct SecurityVerdict {
    Relation relation = Relation::not_safer;
    SecurityDominance dominance = SecurityDominance::none;
    std::optional<double> crossing;                        // finite threshold, when one exists
    std::optional<std::pair<double, double>> witness;       // theta1 < theta2, preference reversal
};

/// Safety between securities: S_a is safer than S_b iff S_b single-crosses
/// S_a from below in cash flows. A pointwise-dominated pair is reported as
/// such (the relation is then trivial: the belief regions never move).
inline SecurityVerdict security_safer(const Security& sa, const Security& sb) {
    const auto cross = security_crossing(sa, sb);

    // Dominance scan over the merged breakpoints.
    std::vector<double> grid;
    std::merge(sa.breakpoints.begin(), sa.breakpoints.end(), sb.breakpoints.begin(),
               sb.breakpoints.end(), std::back_inserter(grid));
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    bool any_pos = false, any_neg = false;
    for (double t : grid) {
        const double d = sb.at(t) - sa.at(t);
        if (d > detail::kSecurityEps) any_pos = true;
        if (d < -detail::kSecurityEps) any_neg = true;
    }

    SecurityVerdict v;
    if (!any_pos && !any_neg)
        v.dominance = SecurityDominance::identical;
    else if (!any_pos)
        v.dominance = SecurityDominance::a_dominates;
    else if (!any_neg)
        v.dominance = SecurityDominance::b_dominates;

    if (cross.passed()) {
        v.relation = Relation::safer;
        if (cross.vbar && std::isfinite(*cross.vbar)) v.crossing = cross.vbar;
    } else {
        v.relation = Relation::not_safer;
        v.witness = cross.violation;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Hedging
// ---------------------------------------------------------------------------

/// Finite distribution of wealth outcomes within one state.
struct DiscreteDistribution {
    std::vector<double> values;
    std::vector<double> probs;

    void validate(const Tolerance& tol = {}) const {
        if (values.empty() || values.size() != probs.size())
            throw Error("distribution needs matching value and probability lists");
        double sum = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw Error("distribution probabilities must be nonnegative");
            sum += p;
        }
        if (!tol.tied(sum, 1.0)) throw Error("distribution probabilities must sum to 1");
    }

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
        return m;
    }

    double cdf(double v) const {
        double c = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] <= v) c += probs[i];
        return c;
    }
};

enum class Fosd { F_dominates, G_dominates, equal, incomparable };

/// First-order stochastic dominance on the merged support: F dominates iff
/// its CDF sits weakly below G's everywhere and strictly somewhere.
inline Fosd fosd(const DiscreteDistribution& f, const DiscreteDistribution& g,
                 const Tolerance& tol = {}) {
    f.validate(tol);
    g.validate(tol);
    std::vector<double> sup;
    sup.insert(sup.end(), f.values.begin(), f.values.end());
    sup.insert(sup.end(), g.values.begin(), g.values.end());
    std::sort(sup.begin(), sup.end());
    sup.erase(std::unique(sup.begin(), sup.end()), sup.end());
    bool f_below = false, g_below = false;
    for (double v : sup) {
        const double cf = f.cdf(v), cg = g.cdf(v);
        if (tol.tied(cf, cg)) continue;
        if (cf < cg)
            f_below = true;
        else
            g_below = true;
    }
    if (!f_below && !g_below) return Fosd::equal;
    if (f_below && !g_below) return Fosd::F_dominates;
    if (g_below && !f_below) return Fosd::G_dominates;
    return Fosd::incomparable;
}

/// Two assets against background wealth: asset a pays w per state, asset b
/// pays v, and wealth is distributed per state.
struct HedgingInstance {
    std::vector<std::string> states;
    std::vector<double> asset_a; // w_theta
    std::vector<double> asset_b; // v_theta
    std::vector<DiscreteDistribution> wealth; // H_theta

    void validate(const Tolerance& tol = {}) const {
        if (states.size() < 2) throw Error("hedging instance needs at least 2 states");
        if (asset_a.size() != states.size() || asset_b.size() != states.size() ||
            wealth.size() != states.size())
            throw Error("hedging instance lists must all match the state count");
        for (const auto& h : wealth) h.validate(tol);
        for (std::size_t s = 0; s < states.size(); ++s)
            if (tol.tied(asset_a[s], asset_b[s]))
                throw Error("assets tie at state \"" + states[s] + "\"");
    }
};

enum class HedgeVerdict { hedges_better, inconclusive };

struct HedgeReport {
    HedgeVerdict verdict = HedgeVerdict::inconclusive;
    // first failing condition, when inconclusive
    std::optional<std::string> failed_condition;
    std::optional<std::pair<std::string, std::string>> failed_pair; // (theta, theta')
};

/// Sufficient conditions for asset a to hedge risk better than asset b:
/// for every theta where a pays more and theta' where b does,
/// w[theta'] >= v[theta], v[theta'] >= w[theta], and the wealth distribution
/// at theta' first-order dominates the one at theta. The conditions are
/// sufficient only, so their failure reports "inconclusive", never a
/// negative verdict.
inline HedgeReport hedge_check(const HedgingInstance& h, const Tolerance& tol = {}) {
    h.validate(tol);
    std::vector<std::size_t> A, B;
    for (std::size_t s = 0; s < h.states.size(); ++s)
        (h.asset_a[s] > h.asset_b[s] ? A : B).push_back(s);
    if (A.empty() || B.empty())
        throw Error("one asset dominates the other state by state; nothing to hedge");

    auto holds = [&](double lhs, double rhs) { return lhs >= rhs || tol.tied(lhs, rhs); };
    HedgeReport rep;
    for (auto th : A)
        for (auto tp : B) {
            if (!holds(h.asset_a[tp], h.asset_b[th])) {
                rep.failed_condition = "w[theta'] >= v[theta]";
                rep.failed_pair = {h.states[th], h.states[tp]};
                return rep;
            }
            if (!holds(h.asset_b[tp], h.asset_a[th])) {
                rep.failed_condition = "v[theta'] >= w[theta]";
                rep.failed_pair = {h.states[th], h.states[tp]};
                return rep;
            }
            const Fosd f = fosd(h.wealth[tp], h.wealth[th], tol);
            if (f != Fosd::F_dominates && f != Fosd::equal) {
                rep.failed_condition = "H[theta'] first-order dominates H[theta]";
                rep.failed_pair = {h.states[th], h.states[tp]};
                return rep;
            }
        }
    rep.verdict = HedgeVerdict::hedges_better;
    return rep;
}

// ---------------------------------------------------------------------------
// Coordination games
// ---------------------------------------------------------------------------

/// Symmetric 2x2 coordination game: alpha1 on (a,a), beta2 on (b,b),
/// mismatch payoffs alpha2 = u1(a,b) and beta1 = u1(b,a), with
/// alpha1 > beta1 and beta2 > alpha2.
struct CoordinationGame {
    double alpha1;
    double alpha2;
    double beta1;
    double beta2;

    void validate() const {
        if (!(alpha1 > beta1)) throw Error("coordination game requires alpha1 > beta1");
        if (!(beta2 > alpha2)) throw Error("coordination game requires beta2 > alpha2");
    }
};

struct GameReport {
    bool aa_safe = false;
    bool bb_safe = false;
    bool aa_risk_dominant = false;
    bool safety_risk_divergence = false; // aa_safe and aa_risk_dominant differ
};

/// (a,a) is safe iff alpha2 >= beta1 and beta2 >= alpha1; (b,b) by the
/// relabeled conditions. Risk dominance of (a,a) is the Harsanyi-Selten
/// inequality beta2 - alpha2 <= alpha1 - beta1; safety is a distinct,
/// weaker-style condition and the report flags when the two diverge.
inline GameReport game_safety(const CoordinationGame& g) {
    g.validate();
    GameReport r;
    r.aa_safe = g.alpha2 >= g.beta1 && g.beta2 >= g.alpha1;
    r.bb_safe = g.beta1 >= g.alpha2 && g.alpha1 >= g.beta2;
    r.aa_risk_dominant = g.beta2 - g.alpha2 <= g.alpha1 - g.beta1;
    r.safety_risk_divergence = r.aa_safe != r.aa_risk_dominant;
    return r;
}

/// The game viewed as a decision problem for one player: the opponent's
/// action is the state.
inline DecisionProblem game_as_decision_problem(const CoordinationGame& g) {
    g.validate();
    DecisionProblem p;
    p.states = {"opp_a", "opp_b"};
    p.actions = {"a", "b"};
    p.payoff = {{g.alpha1, g.alpha2}, {g.beta1, g.beta2}};
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// Quadratic-loss generators
// ---------------------------------------------------------------------------

enum class QuadraticVariant { plain, tweaked };

namespace detail {

inline std::string grid_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

} // namespace detail

/// Quadratic-loss decision problem on the unit interval: payoff
/// 1 - (a - theta)^2, optionally tweaked by + theta^2 (which leaves choices
/// unchanged but makes every payoff row monotone). Requires midpoint
/// genericity: no action pair's midpoint may lie on the state grid, since
/// that is exactly where the two actions tie.
inline DecisionProblem quadratic_problem(QuadraticVariant variant,
                                         const std::vector<double>& actions,
                                         const std::vector<double>& states) {
    auto check_grid = [](const std::vector<double>& g, const char* name) {
        if (g.size() < 2) throw Error(std::string(name) + " grid needs at least 2 values");
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!(g[i] >= 0.0 && g[i] <= 1.0))
                throw Error(std::string(name) + " grid values must lie in [0,1]");
            if (i && !(g[i] > g[i - 1]))
                throw Error(std::string(name) + " grid must be strictly increasing");
        }
    };
    check_grid(actions, "action");
    check_grid(states, "state");
    for (std::size_t i = 0; i < actions.size(); ++i)
        for (std::size_t j = i + 1; j < actions.size(); ++j) {
            const double mid = (actions[i] + actions[j]) / 2.0;
            for (double s : states)
                if (std::fabs(mid - s) < 1e-12)
                    throw Error("midpoint genericity violated: actions " +
                                detail::grid_label(actions[i]) + " and " +
                                detail::grid_label(actions[j]) + " tie at state " +
                                detail::grid_label(s));
        }

    DecisionProblem p;
    for (double a : actions) p.actions.push_back(detail::grid_label(a));
    for (double s : states) p.states.push_back(detail::grid_label(s));
    p.payoff.assign(actions.size(), std::vector<double>(states.size(), 0.0));
    double lowest = 0.0;
    for (std::size_t a = 0; a < actions.size(); ++a)
        for (std::size_t s = 0; s < states.size(); ++s) {
            double u = 1.0 - (actions[a] - states[s]) * (actions[a] - states[s]);
            if (variant == QuadraticVariant::tweaked) u += states[s] * states[s];
            p.payoff[a][s] = u;
            lowest = std::min(lowest, u);
        }
    // verdict-invariant uniform shift keeps payoffs in the nonnegative range
    double shift = 0.0;
    while (lowest + shift < 0.0) shift += 1.0;
    if (shift > 0.0)
        for (auto& row : p.payoff)
            for (auto& u : row) u += shift;
    p.validate();
    return p;
}

inline DecisionProblem quadratic_problem(QuadraticVariant variant,
                                         const std::vector<double>& grid) {
    return quadratic_problem(variant, grid, grid);
}

} // namespace safer
