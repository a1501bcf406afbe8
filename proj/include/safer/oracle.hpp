#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "safer/core.hpp"
#include "safer/crossing.hpp"
#include "safer/relation.hpp"
#include "safer/rng.hpp"

namespace safer {

/// Deterministic-in-seed piecewise-linear concave transform with the stated
/// kink count. Kinks land inside [lo, hi]; slopes decay strictly across
/// segments and stay well above the 1e-6 floor that keeps the map strictly
/// monotone.
inline ConcaveTransform sample_concave(std::uint64_t seed, double lo, double hi,
                                       std::size_t kinks) {
    if (hi < lo) throw Error("sample_concave needs a nonempty payoff range");
    Rng rng(seed);
    if (kinks == 0 || hi == lo) {
        // affine: never changes a verdict, useful as a control
        return ConcaveTransform::affine(rng.uniform(0.25, 2.0), rng.uniform(0.0, 1.0));
    }
    std::vector<double> ks;
    const double width = hi - lo;
    for (std::size_t i = 0; i < kinks; ++i)
        ks.push_back(lo + width * (0.02 + 0.96 * rng.uniform()));
    std::sort(ks.begin(), ks.end());
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i] <= ks[i - 1]) ks[i] = ks[i - 1] + width * 1e-9 + 1e-12;
    if (ks.front() <= 0.0) {
        const double shift = 1e-9 - ks.front();
        for (auto& k : ks) k += shift;
    }
    std::vector<double> slopes;
    double s = rng.uniform(0.6, 1.5);
    slopes.push_back(s);
    for (std::size_t i = 0; i < kinks; ++i) {
        s *= rng.uniform(0.35, 0.92);
        slopes.push_back(s);
    }
    return ConcaveTransform::piecewise(0.0, std::move(ks), std::move(slopes));
}

enum class HullEscape { below, both };

/// Closed-form transforms certifying a violation when a's payoffs escape
/// b's hull from below (beta0 > alpha1). HullEscape::below covers
/// alpha0 <= beta1 with phi(y) = min{y, k y + c} (kink exactly at beta0);
/// HullEscape::both covers alpha0 > beta1 with phi(y) = min{y, (y+beta0)/2}.
inline ConcaveTransform hull_escape_transform(HullEscape which, double a0, double a1, double b0,
                                              double b1) {
    if (!(a0 > b0 && b1 > a1))
        throw Error("hull_escape_transform expects alpha0 > beta0, beta1 > alpha1");
    if (!(b0 > a1)) throw Error("hull_escape_transform requires beta0 > alpha1");
    if (which == HullEscape::below) {
        if (!(a0 <= b1)) throw Error("hull escape below requires alpha0 <= beta1");
        const double den = b0 * (a1 - b0) + a0 * (b0 - 2.0 * a1) + b0 * b1;
        const double c = b0 * (b0 * b1 - a0 * a1) / den;
        const double k = (a0 - b0) * (b0 - a1) / den;
        if (!(k > 0.0 && k < 1.0))
            throw Error("hull escape arithmetic fault: k outside (0,1)");
        return ConcaveTransform::min_affine(k, c);
    }
    if (!(a0 > b1)) throw Error("hull escape on both ends requires alpha0 > beta1");
    return ConcaveTransform::min_affine(0.5, b0 / 2.0);
}

/// Re-evaluates a certificate from raw payoffs: the belief must weakly
/// prefer a under u and strictly prefer b under phi(u) with margin beyond
/// tolerance. The failure reason, if any, is returned for diagnostics.
inline std::optional<std::string> certificate_flaw(const PairClassification& c,
                                                   const ViolationCertificate& cert,
                                                   const Tolerance& tol = {}) {
    if (cert.belief.weights.size() != c.n_states()) return "belief length mismatch";
    double sum = 0.0;
    for (double w : cert.belief.weights) {
        if (!(w >= 0.0)) return "belief weight negative";
        sum += w;
    }
    if (!tol.tied(sum, 1.0)) return "belief does not sum to 1";
    const double eu_a = expected_payoff(c.alpha, cert.belief);
    const double eu_b = expected_payoff(c.beta, cert.belief);
    std::vector<double> pa(c.n_states()), pb(c.n_states());
    for (std::size_t s = 0; s < c.n_states(); ++s) {
        pa[s] = cert.transform(c.alpha[s]);
        pb[s] = cert.transform(c.beta[s]);
    }
    const double ephi_a = expected_payoff(pa, cert.belief);
    const double ephi_b = expected_payoff(pb, cert.belief);
    if (eu_a < eu_b - tol.abs_eps) return "belief does not prefer a under u";
    if (!(ephi_b - ephi_a > tol.abs_eps)) return "transformed preference does not flip";
    return std::nullopt;
}

inline bool verify_certificate(const PairClassification& c, const ViolationCertificate& cert,
                               const Tolerance& tol = {}) {
    return !certificate_flaw(c, cert, tol).has_value();
}

namespace detail {

inline ViolationCertificate evaluate_certificate(const PairClassification& c, Belief belief,
                                                 ConcaveTransform phi) {
    ViolationCertificate cert;
    cert.eu_a = expected_payoff(c.alpha, belief);
    cert.eu_b = expected_payoff(c.beta, belief);
    std::vector<double> pa(c.n_states()), pb(c.n_states());
    for (std::size_t s = 0; s < c.n_states(); ++s) {
        pa[s] = phi(c.alpha[s]);
        pb[s] = phi(c.beta[s]);
    }
    cert.ephi_a = expected_payoff(pa, belief);
    cert.ephi_b = expected_payoff(pb, belief);
    cert.belief = std::move(belief);
    cert.transform = std::move(phi);
    return cert;
}

} // namespace detail

/// Builds a (belief, transform) counterexample for a pair that fails the
/// payoff conditions. Picks a violating edge, constructs the transform (the
/// closed forms when alpha[theta'] < beta[theta], a shrinking cap on
/// beta[theta'] otherwise), and places the belief midway
/// between the transformed and original indifference points on that edge.
/// The result is re-verified numerically before it is returned.
inline ViolationCertificate construct_violation(const PairClassification& c,
                                                const Tolerance& tol = {}) {
    const SafetyVerdict v = is_safer(c, tol);
    if (v.safer()) throw Error("pair is safer: no violation exists");

    auto argmax = [&](const std::vector<double>& vals, const std::vector<std::size_t>& over) {
        std::size_t best = over.front();
        for (auto s : over)
            if (vals[s] > vals[best]) best = s;
        return best;
    };
    auto argmin = [&](const std::vector<double>& vals, const std::vector<std::size_t>& over) {
        std::size_t best = over.front();
        for (auto s : over)
            if (vals[s] < vals[best]) best = s;
        return best;
    };

    // Prefer an edge where alpha[theta'] < beta[theta]: the closed forms
    // cover it. Otherwise only beta[theta'] >= alpha[theta] fails and the
    // cap construction applies.
    std::size_t th, tp;
    bool closed_form;
    {
        const std::size_t bh = argmax(c.beta, c.set_A);
        const std::size_t al = argmin(c.alpha, c.set_B);
        if (c.beta[bh] > c.alpha[al]) {
            th = bh;
            tp = al;
            closed_form = true;
        } else {
            th = argmax(c.alpha, c.set_A);
            tp = argmin(c.beta, c.set_B);
            closed_form = false;
        }
    }
    const double a0 = c.alpha[th], a1 = c.alpha[tp];
    const double b0 = c.beta[th], b1 = c.beta[tp];
    const double lam = edge_indifference_weight(c, th, tp);

    auto transformed_weight = [&](const ConcaveTransform& phi) {
        const double ga = phi(a0) - phi(b0);
        const double gb = phi(b1) - phi(a1);
        return ga / (ga + gb);
    };

    ConcaveTransform phi = ConcaveTransform::identity();
    double lam_hat = lam;
    if (closed_form) {
        phi = hull_escape_transform(a0 <= b1 ? HullEscape::below : HullEscape::both, a0, a1,
                                    b0, b1);
        lam_hat = transformed_weight(phi);
    } else {
        // beta1 < alpha0 with alpha1 >= beta0: cap utils at beta1, slope eps
        // above. Halve eps until the indifference point moves toward the
        // A-vertex; the limit weight is strictly below lam, so this ends.
        double eps = 0.5;
        for (;;) {
            phi = ConcaveTransform::min_affine(eps, b1 * (1.0 - eps));
            lam_hat = transformed_weight(phi);
            if (lam_hat < lam) break;
            eps /= 2.0;
            if (eps < 1e-12)
                throw Error("epsilon underflow while constructing the cap transform");
        }
    }
    if (!(lam_hat < lam))
        throw Error("violation construction failed to move the indifference point");

    const double mid = (lam_hat + lam) / 2.0;
    ViolationCertificate cert =
        detail::evaluate_certificate(c, edge_belief(c.n_states(), th, tp, mid), phi);
    if (auto flaw = certificate_flaw(c, cert, tol))
        throw Error("constructed certificate failed re-verification: " + *flaw);
    return cert;
}

/// Brute-force search over sampled concave transforms and a belief grid for
/// a counterexample to safety. Deterministic in seed; the first hit in
/// (transform index, belief index) order is re-verified and returned.
inline std::optional<ViolationCertificate> falsify_safety(const PairClassification& c,
                                                          std::size_t transforms,
                                                          std::size_t beliefs,
                                                          std::uint64_t seed = 42,
                                                          const Tolerance& tol = {}) {
    require_generic(c);
    if (transforms == 0 || beliefs == 0) return std::nullopt;

    const auto grid = belief_grid(c.n_states(), beliefs, seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<double> du(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        du[i] = expected_payoff(c.alpha, grid[i]) - expected_payoff(c.beta, grid[i]);

    double lo = c.alpha[0], hi = c.alpha[0];
    for (double v : c.alpha) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : c.beta) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    std::vector<double> pa(c.n_states()), pb(c.n_states());
    for (std::size_t t = 0; t < transforms; ++t) {
        const auto phi = sample_concave(seed + t, lo, hi, 1 + t % 4);
        for (std::size_t s = 0; s < c.n_states(); ++s) {
            pa[s] = phi(c.alpha[s]);
            pb[s] = phi(c.beta[s]);
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (du[i] < 0.0) continue;
            const double dphi = expected_payoff(pa, grid[i]) - expected_payoff(pb, grid[i]);
            if (dphi < -tol.abs_eps) {
                auto cert = detail::evaluate_certificate(c, grid[i], phi);
                if (verify_certificate(c, cert, tol)) return cert;
            }
        }
    }
    return std::nullopt;
}

inline std::optional<ViolationCertificate> falsify_safety_default(const PairClassification& c,
                                                                  std::size_t transforms = 2000,
                                                                  std::uint64_t seed = 42,
                                                                  const Tolerance& tol = {}) {
    return falsify_safety(c, transforms, default_grid_size(c.n_states()), seed, tol);
}

} // namespace safer
