#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace safer {

/// Library errors (bad input, violated precondition) are thrown as Error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric tie policy. Two values are "tied" when they agree within
/// abs_eps + rel_eps * max(|v|, |w|). Defaults suit double precision on
/// desk-scale payoffs.
struct Tolerance {
    double abs_eps = 1e-9;
    double rel_eps = 1e-9;

    bool tied(double v, double w) const {
        return std::fabs(v - w) <= abs_eps + rel_eps * std::max(std::fabs(v), std::fabs(w));
    }
};

namespace detail {

inline std::string join(const std::vector<std::string>& items, const char* sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

} // namespace detail

/// A finite decision problem: states, actions, and a nonnegative payoff
/// matrix indexed (action, state), in utils.
struct DecisionProblem {
    std::vector<std::string> states;
    std::vector<std::string> actions;
    std::vector<std::vector<double>> payoff; // payoff[action][state]

    std::size_t n_states() const { return states.size(); }
    std::size_t n_actions() const { return actions.size(); }

    const std::vector<double>& payoffs(std::size_t action) const { return payoff.at(action); }

    std::size_t state_index(const std::string& label) const {
        auto it = std::find(states.begin(), states.end(), label);
        if (it == states.end()) throw Error("unknown state \"" + label + "\"");
        return static_cast<std::size_t>(it - states.begin());
    }

    std::size_t action_index(const std::string& label) const {
        auto it = std::find(actions.begin(), actions.end(), label);
        if (it == actions.end()) throw Error("unknown action \"" + label + "\"");
        return static_cast<std::size_t>(it - actions.begin());
    }

    /// Checks the type invariants. min_states is relaxed to 1 for induced
    /// problems (smooth-ambiguity reduction can legitimately yield a single
    /// induced state; everything downstream then refuses it as degenerate).
    void validate(std::size_t min_states = 2) const {
        if (states.size() < min_states)
            throw Error("fewer than 2 states");
        if (actions.size() < 2)
            throw Error("fewer than 2 actions");
        for (std::size_t i = 0; i < states.size(); ++i)
            for (std::size_t j = i + 1; j < states.size(); ++j)
                if (states[i] == states[j]) throw Error("duplicate label \"" + states[i] + "\"");
        for (std::size_t i = 0; i < actions.size(); ++i)
            for (std::size_t j = i + 1; j < actions.size(); ++j)
                if (actions[i] == actions[j]) throw Error("duplicate label \"" + actions[i] + "\"");
        if (payoff.size() != actions.size())
            throw Error("payoff rows do not match action count");
        for (std::size_t a = 0; a < payoff.size(); ++a) {
            if (payoff[a].size() != states.size())
                throw Error("payoff list length must equal state count (action \"" + actions[a] + "\")");
            for (double v : payoff[a]) {
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw Error("negative payoff (action \"" + actions[a] + "\")");
            }
        }
    }
};

/// A probability vector over the problem's states.
struct Belief {
    std::vector<double> weights;

    static Belief validated(std::vector<double> w, std::size_t n_states,
                            const Tolerance& tol = {}) {
        if (w.size() != n_states) throw Error("belief length does not equal state count");
        double sum = 0.0;
        for (double v : w) {
            if (!(v >= 0.0) || !std::isfinite(v)) throw Error("belief weight must be nonnegative");
            sum += v;
        }
        if (!tol.tied(sum, 1.0)) throw Error("belief weights must sum to 1");
        return Belief{std::move(w)};
    }
};

inline double expected_payoff(const std::vector<double>& payoffs, const Belief& x) {
    double e = 0.0;
    for (std::size_t s = 0; s < payoffs.size(); ++s) e += x.weights[s] * payoffs[s];
    return e;
}

/// Per-pair state split: set_A holds the states where action a is strictly
/// better, set_B where b is, degenerate the within-tolerance ties.
/// Self-contained (copies labels and both payoff vectors) so verdicts and
/// certificates can be reported without the original problem in hand.
struct PairClassification {
    std::string action_a;
    std::string action_b;
    std::vector<std::string> state_labels;
    std::vector<std::size_t> set_A;
    std::vector<std::size_t> set_B;
    std::vector<std::size_t> degenerate;
    std::vector<double> alpha; // payoffs of a, by state
    std::vector<double> beta;  // payoffs of b, by state

    std::size_t n_states() const { return state_labels.size(); }
};

inline PairClassification classify_states(const DecisionProblem& p, std::size_t a, std::size_t b,
                                          const Tolerance& tol = {}) {
    if (a == b) throw Error("cannot classify an action against itself");
    if (a >= p.n_actions() || b >= p.n_actions()) throw Error("action index out of range");
    PairClassification c;
    c.action_a = p.actions[a];
    c.action_b = p.actions[b];
    c.state_labels = p.states;
    c.alpha = p.payoff[a];
    c.beta = p.payoff[b];
    for (std::size_t s = 0; s < p.n_states(); ++s) {
        if (tol.tied(c.alpha[s], c.beta[s]))
            c.degenerate.push_back(s);
        else if (c.alpha[s] > c.beta[s])
            c.set_A.push_back(s);
        else
            c.set_B.push_back(s);
    }
    return c;
}

inline PairClassification classify_states(const DecisionProblem& p, const std::string& a,
                                          const std::string& b, const Tolerance& tol = {}) {
    return classify_states(p, p.action_index(a), p.action_index(b), tol);
}

/// Rejects pairs the characterization does not cover: any tied state, or a pair where
/// one action wins everywhere (weak dominance).
inline const PairClassification& require_generic(const PairClassification& c) {
    if (!c.degenerate.empty()) {
        std::vector<std::string> names;
        for (auto s : c.degenerate) names.push_back(c.state_labels[s]);
        throw Error("degenerate state present: " + detail::join(names));
    }
    if (c.set_A.empty() || c.set_B.empty())
        throw Error("pairwise dominance between \"" + c.action_a + "\" and \"" + c.action_b +
                    "\" (" + (c.set_A.empty() ? c.action_b : c.action_a) + " wins every state)");
    return c;
}

/// Lenient variant: drops tied states from the pair instead of refusing.
/// Still refuses dominance, which dropping cannot repair.
inline PairClassification drop_degenerate(PairClassification c) {
    if (c.degenerate.empty()) return c;
    std::vector<std::size_t> keep;
    for (std::size_t s = 0; s < c.n_states(); ++s)
        if (std::find(c.degenerate.begin(), c.degenerate.end(), s) == c.degenerate.end())
            keep.push_back(s);
    PairClassification out;
    out.action_a = c.action_a;
    out.action_b = c.action_b;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.state_labels.push_back(c.state_labels[keep[i]]);
        out.alpha.push_back(c.alpha[keep[i]]);
        out.beta.push_back(c.beta[keep[i]]);
    }
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (out.alpha[i] > out.beta[i])
            out.set_A.push_back(i);
        else
            out.set_B.push_back(i);
    }
    return out;
}

/// Finds the action with a state-independent payoff, if any. With no weak
/// dominance in the problem there can be at most one; two constant actions
/// violate that premise and are reported as an error.
inline std::optional<std::size_t> detect_risk_free(const DecisionProblem& p,
                                                   const Tolerance& tol = {}) {
    std::vector<std::size_t> constant;
    for (std::size_t a = 0; a < p.n_actions(); ++a) {
        const auto& row = p.payoff[a];
        auto [mn, mx] = std::minmax_element(row.begin(), row.end());
        if (tol.tied(*mn, *mx)) constant.push_back(a);
    }
    if (constant.empty()) return std::nullopt;
    if (constant.size() > 1) {
        std::vector<std::string> names;
        for (auto a : constant) names.push_back(p.actions[a]);
        throw Error("multiple risk-free actions (weak dominance in input): " +
                    detail::join(names));
    }
    return constant.front();
}

} // namespace safer
