#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "safer/core.hpp"
#include "safer/transform.hpp"

namespace safer {

enum class Relation { safer, not_safer };

/// Witness for a failed pairwise-payoff condition: a state pair
/// (theta in A, theta' in B) and the inequality it breaks.
struct StatePairWitness {
    std::string theta;       // state where a is uniquely optimal
    std::string theta_prime; // state where b is uniquely optimal
    std::string inequality;  // the failed condition, human readable
    double lhs = 0.0;        // value that should have been >=
    double rhs = 0.0;        // value it was compared against
};

/// A (belief, transform) counterexample to safety: the belief prefers a
/// under u but b under phi(u). Expectations are re-evaluated from raw
/// payoffs whenever the certificate is checked.
struct ViolationCertificate {
    Belief belief;
    ConcaveTransform transform;
    double eu_a = 0.0;
    double eu_b = 0.0;
    double ephi_a = 0.0;
    double ephi_b = 0.0;
};

struct SafetyVerdict {
    Relation relation = Relation::not_safer;
    /// True when a binding inequality holds (or fails) only within tolerance.
    bool boundary = false;
    std::optional<StatePairWitness> state_witness;          // set when not_safer
    std::optional<ViolationCertificate> counterexample;     // optionally attached later

    bool safer() const { return relation == Relation::safer; }
};

/// Payoff-condition test for the safer-than relation on a generic pair:
/// a is safer than b iff for every theta in A and theta' in B,
/// beta[theta'] >= alpha[theta] and alpha[theta'] >= beta[theta].
/// Both families aggregate to two scalar comparisons.
inline SafetyVerdict is_safer(const PairClassification& c, const Tolerance& tol = {}) {
    require_generic(c);
    auto argmax = [&](const std::vector<double>& v, const std::vector<std::size_t>& over) {
        std::size_t best = over.front();
        for (auto s : over)
            if (v[s] > v[best]) best = s;
        return best;
    };
    auto argmin = [&](const std::vector<double>& v, const std::vector<std::size_t>& over) {
        std::size_t best = over.front();
        for (auto s : over)
            if (v[s] < v[best]) best = s;
        return best;
    };

    const std::size_t a_hi = argmax(c.alpha, c.set_A); // max alpha over A
    const std::size_t b_lo = argmin(c.beta, c.set_B);  // min beta over B
    const std::size_t b_hi = argmax(c.beta, c.set_A);  // max beta over A
    const std::size_t a_lo = argmin(c.alpha, c.set_B); // min alpha over B

    SafetyVerdict v;
    v.boundary = tol.tied(c.beta[b_lo], c.alpha[a_hi]) || tol.tied(c.alpha[a_lo], c.beta[b_hi]);
    if (c.beta[b_lo] < c.alpha[a_hi]) {
        v.relation = Relation::not_safer;
        v.state_witness = StatePairWitness{
            c.state_labels[a_hi], c.state_labels[b_lo],
            "beta[" + c.state_labels[b_lo] + "] >= alpha[" + c.state_labels[a_hi] + "]",
            c.beta[b_lo], c.alpha[a_hi]};
    } else if (c.alpha[a_lo] < c.beta[b_hi]) {
        v.relation = Relation::not_safer;
        v.state_witness = StatePairWitness{
            c.state_labels[b_hi], c.state_labels[a_lo],
            "alpha[" + c.state_labels[a_lo] + "] >= beta[" + c.state_labels[b_hi] + "]",
            c.alpha[a_lo], c.beta[b_hi]};
    } else {
        v.relation = Relation::safer;
    }
    return v;
}

/// Two-state special case (the convex-hull criterion): a is safer than b iff
/// a's payoffs lie inside the hull of b's. Identical verdict to is_safer,
/// kept as the named operation for two-state callers.
inline SafetyVerdict is_safer_two_state(const PairClassification& c, const Tolerance& tol = {}) {
    if (c.n_states() != 2) throw Error("is_safer_two_state requires exactly 2 states");
    return is_safer(c, tol);
}

/// Payoff slopes across the two states (gamma = payoff in the B-state minus
/// payoff in the A-state), the "flatter" comparison, and monotonicity of the
/// upper envelope W.
struct SlopeReport {
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    bool flatter = false;    // |gamma_a| <= |gamma_b|
    bool W_monotone = false; // both slopes weakly the same direction
};

inline SlopeReport slope_report(const PairClassification& c, const Tolerance& tol = {}) {
    if (c.n_states() != 2) throw Error("slope_report requires exactly 2 states");
    require_generic(c);
    // Normalize so state "0" is the A-state.
    const std::size_t s0 = c.set_A.front();
    const std::size_t s1 = c.set_B.front();
    SlopeReport r;
    r.gamma_a = c.alpha[s1] - c.alpha[s0];
    r.gamma_b = c.beta[s1] - c.beta[s0];
    r.flatter = std::fabs(r.gamma_a) <= std::fabs(r.gamma_b);
    auto sign = [&](double g) { return tol.tied(g, 0.0) ? 0 : (g > 0 ? 1 : -1); };
    const int sa = sign(r.gamma_a), sb = sign(r.gamma_b);
    r.W_monotone = sa * sb >= 0; // zero slopes never break monotonicity
    return r;
}

/// The full pairwise verdict matrix plus order-theoretic diagnostics.
struct OrderReport {
    std::vector<std::string> actions;
    // safer[i][j]: action i safer than action j; diagonal true by convention.
    std::vector<std::vector<bool>> safer;
    bool reflexive = true;
    bool antisymmetric = true;
    bool transitive = true;
    bool strongly_connected = true;
    bool total = false; // reflexive && antisymmetric && transitive && strongly connected
    std::vector<std::array<std::size_t, 3>> transitivity_violations; // (a,b,c): a>=b, b>=c, a!>=c

    struct TotalityConditions {
        bool monotone_common_direction = false; // all payoff rows monotone the same way
        int direction = 0;                      // +1 nondecreasing, -1 nonincreasing, 0 n/a
        bool optimality_separated = false;      // per pair, A and B split by the state order
        bool applicable = false;                // both sufficient conditions hold
    } totality;
};

/// Evaluates every ordered action pair via the payoff conditions and checks
/// the sufficient conditions for totality under the given state order:
/// (i) every action's payoff vector monotone in the order, all in one common
/// direction, and (ii) for every pair, the A- and B-states are separated in
/// the order. When both hold the relation totally orders the actions.
inline OrderReport order_report(const DecisionProblem& p,
                                const std::vector<std::size_t>& state_order,
                                const Tolerance& tol = {}) {
    if (state_order.size() != p.n_states()) throw Error("state order must list every state once");
    {
        std::vector<bool> seen(p.n_states(), false);
        for (auto s : state_order) {
            if (s >= p.n_states() || seen[s]) throw Error("state order must be a permutation");
            seen[s] = true;
        }
    }

    const std::size_t n = p.n_actions();
    OrderReport r;
    r.actions = p.actions;
    r.safer.assign(n, std::vector<bool>(n, false));

    bool sep_all = true;
    for (std::size_t i = 0; i < n; ++i) {
        r.safer[i][i] = true; // reflexive by convention
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            auto c = classify_states(p, i, j, tol);
            try {
                require_generic(c);
            } catch (const Error& e) {
                throw Error("non-generic pair (" + p.actions[i] + ", " + p.actions[j] +
                            "): " + e.what());
            }
            r.safer[i][j] = is_safer(c, tol).safer();
            if (i < j) {
                // totality condition (ii): A before B or B before A in the order.
                std::vector<int> pos(p.n_states());
                for (std::size_t k = 0; k < state_order.size(); ++k)
                    pos[state_order[k]] = static_cast<int>(k);
                int maxA = -1, minA = static_cast<int>(p.n_states()), maxB = -1,
                    minB = static_cast<int>(p.n_states());
                for (auto s : c.set_A) {
                    maxA = std::max(maxA, pos[s]);
                    minA = std::min(minA, pos[s]);
                }
                for (auto s : c.set_B) {
                    maxB = std::max(maxB, pos[s]);
                    minB = std::min(minB, pos[s]);
                }
                if (!(maxA < minB || maxB < minA)) sep_all = false;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (r.safer[i][j] && r.safer[j][i]) r.antisymmetric = false;
            if (!r.safer[i][j] && !r.safer[j][i]) r.strongly_connected = false;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (r.safer[i][j] && r.safer[j][k] && !r.safer[i][k]) {
                    r.transitive = false;
                    r.transitivity_violations.push_back({i, j, k});
                }
            }
        }
    r.total = r.reflexive && r.antisymmetric && r.transitive && r.strongly_connected;

    // totality condition (i): a single common monotone direction.
    bool all_nondec = true, all_noninc = true;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t k = 1; k < p.n_states(); ++k) {
            const double prev = p.payoff[a][state_order[k - 1]];
            const double cur = p.payoff[a][state_order[k]];
            if (cur < prev && !tol.tied(cur, prev)) all_nondec = false;
            if (cur > prev && !tol.tied(cur, prev)) all_noninc = false;
        }
    }
    r.totality.monotone_common_direction = all_nondec || all_noninc;
    r.totality.direction = all_nondec ? +1 : (all_noninc ? -1 : 0);
    r.totality.optimality_separated = sep_all;
    r.totality.applicable = r.totality.monotone_common_direction && sep_all;
    return r;
}

inline OrderReport order_report(const DecisionProblem& p, const Tolerance& tol = {}) {
    std::vector<std::size_t> order(p.n_states());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    return order_report(p, order, tol);
}

/// Smooth-ambiguity reduction: the induced problem whose states are the
/// given priors and whose payoffs are psi applied to the prior-expected
/// utils. Running the safety test on the output decides safety under
/// increased ambiguity aversion.
inline DecisionProblem smooth_reduce(const DecisionProblem& p, const std::vector<Belief>& priors,
                                     const ConcaveTransform& psi) {
    if (priors.empty()) throw Error("smooth_reduce needs at least one prior");
    for (const auto& pi : priors)
        if (pi.weights.size() != p.n_states())
            throw Error("prior length does not equal state count");
    DecisionProblem out;
    out.actions = p.actions;
    for (std::size_t i = 0; i < priors.size(); ++i) out.states.push_back("pi" + std::to_string(i));
    out.payoff.assign(p.n_actions(), std::vector<double>(priors.size(), 0.0));
    for (std::size_t a = 0; a < p.n_actions(); ++a)
        for (std::size_t i = 0; i < priors.size(); ++i)
            out.payoff[a][i] = psi(expected_payoff(p.payoff[a], priors[i]));
    out.validate(1); // a single prior yields a one-state problem; callers hit require_generic
    return out;
}

} // namespace safer
