// Command-line front end: ingest problem files, run the safety analyses,
// emit verdict reports and plot data.
//
// Exit codes: 0 = safer / positive verdict, 1 = not safer / negative or
// inconclusive verdict, 2 = error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safer/safer.hpp"

namespace {

using safer::json;

struct Options {
    double tol_abs = 1e-9;
    double tol_rel = 1e-9;
    std::uint64_t seed = 42;
    std::size_t grid = 0; // 0: default size for the state count
    std::size_t transforms = 2000;
    std::string transform_spec = "power:t=2";
    std::string out;
    std::string format = "json";

    safer::Tolerance tol() const { return {tol_abs, tol_rel}; }
};

void emit(const Options& opt, const std::string& content) {
    if (opt.out.empty())
        std::cout << content;
    else
        safer::write_file_atomic(opt.out, content);
}

std::size_t grid_size(const Options& opt, std::size_t n_states) {
    return opt.grid ? opt.grid : safer::default_grid_size(n_states);
}

json crossing_summary(const safer::PairClassification& c, const Options& opt) {
    auto beliefs = safer::belief_grid(c.n_states(), grid_size(opt, c.n_states()), opt.seed);
    safer::augment_with_edge_points(beliefs, c);
    auto rep = safer::robust_single_cross(c, beliefs, opt.tol());
    json out;
    out["pass"] = rep.pass;
    out["beliefs_checked"] = rep.beliefs_checked;
    out["grid_seed"] = opt.seed;
    if (!rep.pass) {
        out["failing_belief"] = rep.failing_belief->weights;
        out["verdict"] = safer::crossing_to_json(*rep.failing_verdict);
    }
    return out;
}

int cmd_compare(const std::string& path, const std::string& a, const std::string& b,
                bool lenient, const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(path));
    auto c = safer::classify_states(problem, a, b, opt.tol());
    std::vector<std::string> dropped;
    if (lenient && !c.degenerate.empty()) {
        for (auto s : c.degenerate) dropped.push_back(c.state_labels[s]);
        c = safer::drop_degenerate(c);
    }
    safer::require_generic(c);
    auto verdict = safer::is_safer(c, opt.tol());
    if (!verdict.safer()) {
        auto cert = safer::construct_violation(c, opt.tol());
        if (!dropped.empty()) {
            // certificates stay valid on the full problem once the dropped
            // (tied) states carry exact zero weight
            std::vector<double> full(problem.n_states(), 0.0);
            for (std::size_t s = 0; s < c.n_states(); ++s)
                full[problem.state_index(c.state_labels[s])] = cert.belief.weights[s];
            cert.belief.weights = std::move(full);
        }
        verdict.counterexample = std::move(cert);
    }

    json report = safer::verdict_to_json(verdict, c);
    report["command"] = "compare";
    report["seed"] = opt.seed;
    report["tolerance"] = {{"abs", opt.tol_abs}, {"rel", opt.tol_rel}};
    if (!dropped.empty()) report["dropped_states"] = dropped;
    report["single_crossing"] = crossing_summary(c, opt);
    if (c.n_states() == 2) {
        auto s = safer::slope_report(c, opt.tol());
        report["slopes"] = {{"gamma_a", s.gamma_a},
                            {"gamma_b", s.gamma_b},
                            {"flatter", s.flatter},
                            {"W_monotone", s.W_monotone}};
    }
    emit(opt, report.dump(2) + "\n");
    return verdict.safer() ? 0 : 1;
}

int cmd_order(const std::string& path, const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(path));
    auto r = safer::order_report(problem, opt.tol());
    json report;
    report["schema"] = 1;
    report["command"] = "order";
    report["actions"] = r.actions;
    json matrix = json::array();
    for (const auto& row : r.safer) {
        json jrow = json::array();
        for (bool v : row) jrow.push_back(v);
        matrix.push_back(jrow);
    }
    report["safer_matrix"] = matrix;
    report["reflexive"] = r.reflexive;
    report["antisymmetric"] = r.antisymmetric;
    report["transitive"] = r.transitive;
    report["strongly_connected"] = r.strongly_connected;
    report["total"] = r.total;
    json viols = json::array();
    for (const auto& [x, y, z] : r.transitivity_violations)
        viols.push_back({r.actions[x], r.actions[y], r.actions[z]});
    report["transitivity_violations"] = viols;
    report["totality_conditions"] = {
        {"monotone_common_direction", r.totality.monotone_common_direction},
        {"direction", r.totality.direction},
        {"optimality_separated", r.totality.optimality_separated},
        {"applicable", r.totality.applicable}};
    emit(opt, report.dump(2) + "\n");
    return 0;
}

int cmd_regions(const std::string& path, const std::string& a, const std::string& b,
                const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(path));
    if (problem.n_states() > 3) throw safer::Error("region export limited to <= 3 states");
    auto c = safer::classify_states(problem, a, b, opt.tol());
    safer::require_generic(c);
    auto phi = safer::ConcaveTransform::parse(opt.transform_spec);
    auto region = safer::preference_region(c);
    auto region_hat = safer::transformed_region(c, phi, opt.tol());
    auto inclusion = safer::region_included(region, region_hat, opt.tol());

    const std::string prefix = opt.out.empty() ? "regions" : opt.out;
    safer::write_file_atomic(prefix + "_region_u.csv", safer::region_csv(region));
    safer::write_file_atomic(prefix + "_region_phi.csv",
                             safer::region_csv(region_hat, &inclusion));
    if (problem.n_states() == 3) {
        safer::write_file_atomic(prefix + "_polygon_u.csv", safer::polygon_csv(region));
        safer::write_file_atomic(prefix + "_polygon_phi.csv", safer::polygon_csv(region_hat));
    }

    json report;
    report["schema"] = 1;
    report["command"] = "regions";
    report["transform"] = phi.describe();
    report["included"] = inclusion.included;
    json margins = json::array();
    for (const auto& m : inclusion.margins)
        margins.push_back({{"theta", c.state_labels[m.theta]},
                           {"theta_prime", c.state_labels[m.theta_prime]},
                           {"u_weight", m.u_lambda},
                           {"phi_weight", m.phi_lambda},
                           {"margin", m.margin}});
    report["margins"] = margins;
    report["files"] = {prefix + "_region_u.csv", prefix + "_region_phi.csv"};
    if (problem.n_states() == 3) {
        report["files"].push_back(prefix + "_polygon_u.csv");
        report["files"].push_back(prefix + "_polygon_phi.csv");
    }
    std::cout << report.dump(2) + "\n";
    return inclusion.included ? 0 : 1;
}

int cmd_crossing(const std::string& path, const std::string& a, const std::string& b,
                 const std::string& belief_csv, const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(path));
    auto c = safer::classify_states(problem, a, b, opt.tol());
    safer::require_generic(c);

    if (!belief_csv.empty()) {
        auto weights = safer::detail::parse_double_list(belief_csv);
        auto x = safer::Belief::validated(weights, problem.n_states(), opt.tol());
        auto fa = safer::induced_cdf(problem, a, x);
        auto fb = safer::induced_cdf(problem, b, x);
        auto verdict = safer::single_cross_test(fa, fb, opt.tol());
        if (opt.format == "csv") {
            emit(opt, "# action " + a + "\n" + safer::cdf_csv(fa) + "# action " + b + "\n" +
                          safer::cdf_csv(fb));
        } else {
            json report;
            report["schema"] = 1;
            report["command"] = "crossing";
            report["belief"] = x.weights;
            report["cdf_a"] = {{"support", fa.support}, {"cum", fa.cum}};
            report["cdf_b"] = {{"support", fb.support}, {"cum", fb.cum}};
            report["verdict"] = safer::crossing_to_json(verdict);
            emit(opt, report.dump(2) + "\n");
        }
        return verdict.passed() ? 0 : 1;
    }

    json report;
    report["schema"] = 1;
    report["command"] = "crossing";
    report["robust"] = crossing_summary(c, opt);
    emit(opt, report.dump(2) + "\n");
    return report["robust"]["pass"].get<bool>() ? 0 : 1;
}

int cmd_falsify(const std::string& path, const std::string& a, const std::string& b,
                const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(path));
    auto c = safer::classify_states(problem, a, b, opt.tol());
    safer::require_generic(c);
    auto found = safer::falsify_safety(c, opt.transforms, grid_size(opt, c.n_states()), opt.seed,
                                       opt.tol());
    json report;
    report["schema"] = 1;
    report["command"] = "falsify";
    report["action_a"] = a;
    report["action_b"] = b;
    report["transforms"] = opt.transforms;
    report["beliefs"] = grid_size(opt, c.n_states());
    report["seed"] = opt.seed;
    report["found"] = found.has_value();
    if (found) report["certificate"] = safer::certificate_to_json(*found);
    emit(opt, report.dump(2) + "\n");
    return found ? 1 : 0;
}

int cmd_verify(const std::string& problem_path, const std::string& report_path,
               const Options& opt) {
    auto problem = safer::parse_problem(safer::read_file(problem_path));
    json doc = json::parse(safer::read_file(report_path));
    if (!doc.contains("certificate")) throw safer::Error("report carries no certificate");
    const std::string a = doc.at("action_a").get<std::string>();
    const std::string b = doc.at("action_b").get<std::string>();
    auto c = safer::classify_states(problem, a, b, opt.tol());
    auto cert = safer::certificate_from_json(doc.at("certificate"));
    auto flaw = safer::certificate_flaw(c, cert, opt.tol());

    // report the re-evaluated expectations, never the cached ones
    auto fresh = cert;
    fresh.eu_a = safer::expected_payoff(c.alpha, cert.belief);
    fresh.eu_b = safer::expected_payoff(c.beta, cert.belief);
    std::vector<double> pa(c.n_states()), pb(c.n_states());
    for (std::size_t s = 0; s < c.n_states(); ++s) {
        pa[s] = cert.transform(c.alpha[s]);
        pb[s] = cert.transform(c.beta[s]);
    }
    fresh.ephi_a = safer::expected_payoff(pa, cert.belief);
    fresh.ephi_b = safer::expected_payoff(pb, cert.belief);

    json out;
    out["schema"] = 1;
    out["command"] = "verify";
    out["valid"] = !flaw.has_value();
    if (flaw) out["flaw"] = *flaw;
    out["reevaluated"] = safer::certificate_to_json(fresh)["expectations"];
    emit(opt, out.dump(2) + "\n");
    return flaw ? 1 : 0;
}

safer::Security parse_security_arg(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@')
        return safer::parse_security(json::parse(safer::read_file(arg.substr(1))));
    auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw safer::Error("security spec must be kind=param or @file.json");
    const std::string kind = arg.substr(0, eq);
    const double param = std::stod(arg.substr(eq + 1));
    if (kind == "debt") return safer::make_debt(param);
    if (kind == "equity") return safer::make_equity(param);
    if (kind == "call") return safer::make_call(param);
    throw safer::Error("unknown security kind \"" + kind + "\"");
}

int cmd_securities(const std::string& a_spec, const std::string& b_spec, const Options& opt) {
    auto sa = parse_security_arg(a_spec);
    auto sb = parse_security_arg(b_spec);
    auto v = safer::security_safer(sa, sb);
    json report;
    report["schema"] = 1;
    report["command"] = "apps securities";
    report["security_a"] = safer::security_to_json(sa);
    report["security_b"] = safer::security_to_json(sb);
    report["relation"] = v.relation == safer::Relation::safer ? "safer" : "not_safer";
    switch (v.dominance) {
        case safer::SecurityDominance::a_dominates: report["dominance"] = "a_dominates"; break;
        case safer::SecurityDominance::b_dominates: report["dominance"] = "b_dominates"; break;
        case safer::SecurityDominance::identical: report["dominance"] = "identical"; break;
        case safer::SecurityDominance::none: report["dominance"] = "none"; break;
    }
    if (v.crossing) report["crossing"] = *v.crossing;
    if (v.witness) report["witness"] = {v.witness->first, v.witness->second};
    emit(opt, report.dump(2) + "\n");
    return v.relation == safer::Relation::safer ? 0 : 1;
}

int cmd_hedge(const std::string& path, const Options& opt) {
    auto h = safer::parse_hedging(safer::read_file(path));
    auto rep = safer::hedge_check(h, opt.tol());
    json report;
    report["schema"] = 1;
    report["command"] = "apps hedge";
    report["verdict"] =
        rep.verdict == safer::HedgeVerdict::hedges_better ? "hedges_better" : "inconclusive";
    if (rep.failed_condition) {
        report["failed_condition"] = *rep.failed_condition;
        report["failed_pair"] = {rep.failed_pair->first, rep.failed_pair->second};
    }
    emit(opt, report.dump(2) + "\n");
    return rep.verdict == safer::HedgeVerdict::hedges_better ? 0 : 1;
}

int cmd_game(double a1, double b1, double a2, double b2, const Options& opt) {
    safer::CoordinationGame g{a1, a2, b1, b2};
    auto r = safer::game_safety(g);
    json report;
    report["schema"] = 1;
    report["command"] = "apps game";
    report["payoffs"] = {{"alpha1", a1}, {"beta1", b1}, {"alpha2", a2}, {"beta2", b2}};
    report["aa_safe"] = r.aa_safe;
    report["bb_safe"] = r.bb_safe;
    report["aa_risk_dominant"] = r.aa_risk_dominant;
    report["safety_risk_divergence"] = r.safety_risk_divergence;
    emit(opt, report.dump(2) + "\n");
    return r.aa_safe ? 0 : 1;
}

int cmd_quadratic(const std::string& variant, const std::string& actions_csv,
                  const std::string& states_csv, const Options& opt) {
    const auto v = variant == "tweaked" ? safer::QuadraticVariant::tweaked
                                        : safer::QuadraticVariant::plain;
    if (variant != "plain" && variant != "tweaked")
        throw safer::Error("variant must be plain or tweaked");
    auto actions = safer::detail::parse_double_list(actions_csv);
    auto states = states_csv.empty() ? actions : safer::detail::parse_double_list(states_csv);
    auto p = safer::quadratic_problem(v, actions, states);
    emit(opt, safer::serialize_problem(p));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"safer-than relation for finite decision problems"};
    app.require_subcommand(1);

    Options opt;
    app.add_option("--tol-abs", opt.tol_abs, "absolute tolerance");
    app.add_option("--tol-rel", opt.tol_rel, "relative tolerance");
    app.add_option("--seed", opt.seed, "seed for randomized sweeps");
    app.add_option("--grid", opt.grid, "belief grid size (0: default per state count)");
    app.add_option("--transforms", opt.transforms, "transform count for falsify");
    app.add_option("--transform", opt.transform_spec, "transform spec: power:t=2 or pwl:...");
    app.add_option("--out", opt.out, "output path (regions: path prefix)");
    app.add_option("--format", opt.format, "json|csv where applicable")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string file, action_a, action_b, belief_csv, report_path;
    std::string sec_a, sec_b, variant, actions_csv, states_csv;
    double g_a1 = 0, g_b1 = 0, g_a2 = 0, g_b2 = 0;

    auto* compare = app.add_subcommand("compare", "decide whether action a is safer than b");
    compare->add_option("file", file)->required();
    compare->add_option("a", action_a)->required();
    compare->add_option("b", action_b)->required();
    bool lenient = false;
    compare->add_flag("--lenient", lenient,
                      "drop within-tolerance tied states instead of refusing the pair");

    auto* order = app.add_subcommand("order", "pairwise verdicts and order diagnostics");
    order->add_option("file", file)->required();

    auto* regions = app.add_subcommand("regions", "export preference regions as CSV");
    regions->add_option("file", file)->required();
    regions->add_option("a", action_a)->required();
    regions->add_option("b", action_b)->required();

    auto* crossing = app.add_subcommand("crossing", "single-crossing tests");
    crossing->add_option("file", file)->required();
    crossing->add_option("a", action_a)->required();
    crossing->add_option("b", action_b)->required();
    crossing->add_option("--belief", belief_csv, "comma-separated belief weights");

    auto* falsify = app.add_subcommand("falsify", "brute-force search for a counterexample");
    falsify->add_option("file", file)->required();
    falsify->add_option("a", action_a)->required();
    falsify->add_option("b", action_b)->required();

    auto* verify = app.add_subcommand("verify", "re-validate a certificate against a problem");
    verify->add_option("file", file)->required();
    verify->add_option("report", report_path)->required();

    auto* apps = app.add_subcommand("apps", "application analyses");
    apps->require_subcommand(1);
    auto* securities = apps->add_subcommand("securities", "compare two securities");
    securities->add_option("a", sec_a, "kind=param or @file.json")->required();
    securities->add_option("b", sec_b, "kind=param or @file.json")->required();
    auto* hedge = apps->add_subcommand("hedge", "hedging sufficient conditions");
    hedge->add_option("file", file)->required();
    auto* game = apps->add_subcommand("game", "coordination game safety");
    game->add_option("alpha1", g_a1)->required();
    game->add_option("beta1", g_b1)->required();
    game->add_option("alpha2", g_a2)->required();
    game->add_option("beta2", g_b2)->required();
    auto* quadratic = apps->add_subcommand("quadratic", "generate a quadratic-loss problem");
    quadratic->add_option("variant", variant, "plain|tweaked")->required();
    quadratic->add_option("--actions", actions_csv, "action grid, comma separated")->required();
    quadratic->add_option("--states", states_csv, "state grid (defaults to the action grid)");

    // allow the global flags to appear after the subcommand
    for (auto* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*compare) return cmd_compare(file, action_a, action_b, lenient, opt);
        if (*order) return cmd_order(file, opt);
        if (*regions) return cmd_regions(file, action_a, action_b, opt);
        if (*crossing) return cmd_crossing(file, action_a, action_b, belief_csv, opt);
        if (*falsify) return cmd_falsify(file, action_a, action_b, opt);
        if (*verify) return cmd_verify(file, report_path, opt);
        if (*securities) return cmd_securities(sec_a, sec_b, opt);
        if (*hedge) return cmd_hedge(file, opt);
        if (*game) return cmd_game(g_a1, g_b1, g_a2, g_b2, opt);
        if (*quadratic) return cmd_quadratic(variant, actions_csv, states_csv, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
