#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "safer/core.hpp"
#include "safer/crossing.hpp"
#include "safer/transform.hpp"

namespace safer {

/// The belief region preferring one action over another, by its extreme
/// points: the simplex vertices of the A-states and one indifference point
/// per (A, B) edge. For three states also carries the boundary polygon in
/// the (P(state 1), P(state 2)) projection, counterclockwise.
struct PreferenceRegion {
    std::string owner; // the preferred action
    std::string other;
    std::vector<std::string> state_labels;
    std::vector<std::size_t> vertices_A;

    struct EdgePoint {
        std::size_t theta;       // state in A
        std::size_t theta_prime; // state in B
        double lambda;           // weight on theta_prime, in (0,1)
        Belief point;
    };
    std::vector<EdgePoint> edge_points; // ordered by (theta, theta_prime)

    std::vector<double> halfspace_normal;          // alpha - beta per state
    std::vector<std::array<double, 2>> polygon;    // 3-state only

    const EdgePoint* find_edge(std::size_t theta, std::size_t theta_prime) const {
        for (const auto& e : edge_points)
            if (e.theta == theta && e.theta_prime == theta_prime) return &e;
        return nullptr;
    }
};

/// The unique belief on the edge between theta (in A) and theta' (in B)
/// at which the two actions' expected payoffs coincide.
inline Belief indifference_point(const PairClassification& c, std::size_t theta,
                                 std::size_t theta_prime) {
    require_generic(c);
    if (std::find(c.set_A.begin(), c.set_A.end(), theta) == c.set_A.end())
        throw Error("state \"" + c.state_labels.at(theta) + "\" is not in the A-set");
    if (std::find(c.set_B.begin(), c.set_B.end(), theta_prime) == c.set_B.end())
        throw Error("state \"" + c.state_labels.at(theta_prime) + "\" is not in the B-set");
    const double lam = edge_indifference_weight(c, theta, theta_prime);
    return edge_belief(c.n_states(), theta, theta_prime, lam);
}

namespace detail {

inline std::array<double, 2> project_3state(const Belief& x) {
    // state 0 -> (0,0), state 1 -> (1,0), state 2 -> (0,1)
    return {x.weights[1], x.weights[2]};
}

inline std::vector<std::array<double, 2>> ccw_polygon(std::vector<std::array<double, 2>> pts) {
    double cx = 0.0, cy = 0.0;
    for (auto& p : pts) {
        cx += p[0];
        cy += p[1];
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
        return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
    });
    return pts;
}

} // namespace detail

/// Extreme-point representation of the region preferring a to b.
inline PreferenceRegion preference_region(const PairClassification& c) {
    require_generic(c);
    PreferenceRegion r;
    r.owner = c.action_a;
    r.other = c.action_b;
    r.state_labels = c.state_labels;
    r.vertices_A = c.set_A;
    for (auto th : c.set_A)
        for (auto tp : c.set_B) {
            const double lam = edge_indifference_weight(c, th, tp);
            r.edge_points.push_back({th, tp, lam, edge_belief(c.n_states(), th, tp, lam)});
        }
    r.halfspace_normal.resize(c.n_states());
    for (std::size_t s = 0; s < c.n_states(); ++s) r.halfspace_normal[s] = c.alpha[s] - c.beta[s];

    if (c.n_states() == 3) {
        std::vector<std::array<double, 2>> pts;
        for (auto th : c.set_A) {
            Belief v{std::vector<double>(3, 0.0)};
            v.weights[th] = 1.0;
            pts.push_back(detail::project_3state(v));
        }
        for (const auto& e : r.edge_points) pts.push_back(detail::project_3state(e.point));
        r.polygon = detail::ccw_polygon(std::move(pts));
    }
    return r;
}

/// Region of the transformed problem (payoffs phi(alpha), phi(beta)).
/// A strictly monotone transform preserves the A/B split exactly; if the
/// transformed payoffs tie or flip within tolerance the pair is refused.
inline PreferenceRegion transformed_region(const PairClassification& c,
                                           const ConcaveTransform& phi,
                                           const Tolerance& tol = {}) {
    require_generic(c);
    PairClassification tc = c;
    for (std::size_t s = 0; s < c.n_states(); ++s) {
        tc.alpha[s] = phi(c.alpha[s]);
        tc.beta[s] = phi(c.beta[s]);
        if (tol.tied(tc.alpha[s], tc.beta[s]))
            throw Error("transform ties the pair at state \"" + c.state_labels[s] + "\"");
        const bool was_a = c.alpha[s] > c.beta[s];
        if (was_a != (tc.alpha[s] > tc.beta[s]))
            throw Error("transform is not monotone on the payoffs at state \"" +
                        c.state_labels[s] + "\"");
    }
    return preference_region(tc);
}

struct EdgeMargin {
    std::size_t theta;
    std::size_t theta_prime;
    double u_lambda;    // indifference weight under u
    double phi_lambda;  // indifference weight under phi(u)
    double margin;      // phi_lambda - u_lambda; >= 0 means the region grew
};

struct InclusionReport {
    bool included = true;
    std::vector<EdgeMargin> margins;
};

/// Edge-point inclusion test: the original region sits inside the
/// transformed one iff on every (A,B) edge the original indifference point
/// lies weakly between the A-vertex and the transformed indifference point,
/// i.e. the weight on theta' does not decrease.
inline InclusionReport region_included(const PreferenceRegion& r, const PreferenceRegion& rhat,
                                       const Tolerance& tol = {}) {
    if (r.owner != rhat.owner || r.other != rhat.other || r.state_labels != rhat.state_labels ||
        r.edge_points.size() != rhat.edge_points.size())
        throw Error("regions were not built from the same action pair");
    InclusionReport rep;
    for (const auto& e : r.edge_points) {
        const auto* ehat = rhat.find_edge(e.theta, e.theta_prime);
        if (!ehat) throw Error("regions were not built from the same action pair");
        EdgeMargin m{e.theta, e.theta_prime, e.lambda, ehat->lambda, ehat->lambda - e.lambda};
        if (m.margin < -tol.abs_eps) rep.included = false;
        rep.margins.push_back(m);
    }
    return rep;
}

} // namespace safer
