#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "safer/applications.hpp"
#include "safer/core.hpp"
#include "safer/crossing.hpp"
#include "safer/geometry.hpp"
#include "safer/oracle.hpp"
#include "safer/relation.hpp"

namespace safer {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Problem files
// ---------------------------------------------------------------------------

/// Parses the problem file format:
/// {"states": ["s0", ...], "actions": [{"name": "a", "payoffs": [..]}, ...]}
inline DecisionProblem parse_problem(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("states") || !doc.contains("actions"))
        throw Error("malformed document: expected {\"states\": [...], \"actions\": [...]}");
    DecisionProblem p;
    try {
        for (const auto& s : doc.at("states")) p.states.push_back(s.get<std::string>());
        for (const auto& a : doc.at("actions")) {
            p.actions.push_back(a.at("name").get<std::string>());
            p.payoff.push_back(a.at("payoffs").get<std::vector<double>>());
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    p.validate();
    return p;
}

inline std::string serialize_problem(const DecisionProblem& p) {
    json doc;
    doc["states"] = p.states;
    doc["actions"] = json::array();
    for (std::size_t a = 0; a < p.n_actions(); ++a)
        doc["actions"].push_back({{"name", p.actions[a]}, {"payoffs", p.payoff[a]}});
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Application files
// ---------------------------------------------------------------------------

/// {"kind": "debt"|"equity"|"call", "param": v} or
/// {"breakpoints": [...], "values": [...]}
inline Security parse_security(const json& doc) {
    if (doc.contains("kind")) {
        const std::string kind = doc.at("kind").get<std::string>();
        const double param = doc.at("param").get<double>();
        if (kind == "equity") return make_equity(param);
        if (kind == "debt") return make_debt(param);
        if (kind == "call") return make_call(param);
        throw Error("unknown security kind \"" + kind + "\"");
    }
    return make_custom_security(doc.at("breakpoints").get<std::vector<double>>(),
                                doc.at("values").get<std::vector<double>>());
}

inline json security_to_json(const Security& s) {
    return json{{"breakpoints", s.breakpoints}, {"values", s.values}};
}

/// {"states": [...], "asset_a": [...], "asset_b": [...],
///  "wealth": [{"values": [...], "probs": [...]}, ...]}
inline HedgingInstance parse_hedging(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    HedgingInstance h;
    try {
        for (const auto& s : doc.at("states")) h.states.push_back(s.get<std::string>());
        h.asset_a = doc.at("asset_a").get<std::vector<double>>();
        h.asset_b = doc.at("asset_b").get<std::vector<double>>();
        for (const auto& w : doc.at("wealth"))
            h.wealth.push_back(DiscreteDistribution{w.at("values").get<std::vector<double>>(),
                                                    w.at("probs").get<std::vector<double>>()});
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    h.validate();
    return h;
}

/// {"alpha1": .., "alpha2": .., "beta1": .., "beta2": ..}
inline CoordinationGame parse_game(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    CoordinationGame g{};
    try {
        g.alpha1 = doc.at("alpha1").get<double>();
        g.alpha2 = doc.at("alpha2").get<double>();
        g.beta1 = doc.at("beta1").get<double>();
        g.beta2 = doc.at("beta2").get<double>();
    } catch (const json::exception& e) {
        throw Error(std::string("malformed document: ") + e.what());
    }
    g.validate();
    return g;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json belief_to_json(const Belief& x) { return json(x.weights); }

inline json certificate_to_json(const ViolationCertificate& cert) {
    return json{{"belief", cert.belief.weights},
                {"transform", cert.transform.describe()},
                {"expectations",
                 {{"eu_a", cert.eu_a},
                  {"eu_b", cert.eu_b},
                  {"ephi_a", cert.ephi_a},
                  {"ephi_b", cert.ephi_b}}}};
}

inline ViolationCertificate certificate_from_json(const json& doc) {
    ViolationCertificate cert;
    cert.belief.weights = doc.at("belief").get<std::vector<double>>();
    cert.transform = ConcaveTransform::parse(doc.at("transform").get<std::string>());
    const auto& e = doc.at("expectations");
    cert.eu_a = e.at("eu_a").get<double>();
    cert.eu_b = e.at("eu_b").get<double>();
    cert.ephi_a = e.at("ephi_a").get<double>();
    cert.ephi_b = e.at("ephi_b").get<double>();
    return cert;
}

inline json verdict_to_json(const SafetyVerdict& v, const PairClassification& c) {
    json out;
    out["schema"] = 1;
    out["action_a"] = c.action_a;
    out["action_b"] = c.action_b;
    out["relation"] = v.safer() ? "safer" : "not_safer";
    out["boundary"] = v.boundary;
    if (v.state_witness) {
        out["witness"] = {{"kind", "state_pair"},
                          {"theta", v.state_witness->theta},
                          {"theta_prime", v.state_witness->theta_prime},
                          {"inequality", v.state_witness->inequality},
                          {"lhs", v.state_witness->lhs},
                          {"rhs", v.state_witness->rhs}};
    }
    if (v.counterexample) {
        out["certificate"] = certificate_to_json(*v.counterexample);
        out["certificate"]["kind"] = "belief_transform";
    }
    return out;
}

inline json crossing_to_json(const CrossingVerdict& v) {
    json out;
    out["crosses"] = v.passed() ? "single_cross_from_below" : "fails";
    if (v.vbar) {
        if (std::isfinite(*v.vbar))
            out["vbar"] = *v.vbar;
        else
            out["vbar"] = "unbounded";
    }
    if (v.violation) out["violation"] = {v.violation->first, v.violation->second};
    return out;
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

/// One row per extreme point: kind, label, state weights, margin. Margins
/// are per-edge inclusion margins when an inclusion report is supplied
/// (vertex rows carry 0).
inline std::string region_csv(const PreferenceRegion& r,
                              const InclusionReport* inclusion = nullptr) {
    std::ostringstream out;
    out << "kind,label";
    for (const auto& s : r.state_labels) out << ",w_" << s;
    out << ",margin\n";
    for (auto th : r.vertices_A) {
        out << "vertex," << r.state_labels[th];
        for (std::size_t s = 0; s < r.state_labels.size(); ++s)
            out << "," << (s == th ? "1" : "0");
        out << ",0\n";
    }
    for (const auto& e : r.edge_points) {
        out << "edge," << r.state_labels[e.theta] << "->" << r.state_labels[e.theta_prime];
        for (double w : e.point.weights) out << "," << csv_double(w);
        double margin = 0.0;
        if (inclusion)
            for (const auto& m : inclusion->margins)
                if (m.theta == e.theta && m.theta_prime == e.theta_prime) margin = m.margin;
        out << "," << csv_double(margin) << "\n";
    }
    return out.str();
}

/// Projected boundary polygon (3-state regions), one x,y row per vertex.
inline std::string polygon_csv(const PreferenceRegion& r) {
    if (r.polygon.empty()) throw Error("polygon export needs a 3-state region");
    std::ostringstream out;
    out << "x,y\n";
    for (const auto& p : r.polygon) out << csv_double(p[0]) << "," << csv_double(p[1]) << "\n";
    return out.str();
}

inline std::string cdf_csv(const DiscreteCDF& f) {
    std::ostringstream out;
    out << "value,cumulative\n";
    for (std::size_t i = 0; i < f.support.size(); ++i)
        out << csv_double(f.support[i]) << "," << csv_double(f.cum[i]) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Write-then-rename so readers never observe a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write \"" + tmp + "\"");
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot move \"" + tmp + "\" into place");
}

} // namespace safer
