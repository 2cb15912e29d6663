#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "platdesign/artifact.hpp"
#include "platdesign/config.hpp"
#include "platdesign/errors.hpp"
#include "platdesign/json_io.hpp"
#include "platdesign/oracle.hpp"
#include "platdesign/report.hpp"
#include "platdesign/service.hpp"
#include "platdesign/table3.hpp"

namespace pd = platdesign;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::optional<std::string> method;
    std::optional<std::uint64_t> mc_draws;
    std::optional<std::string> out;
    std::optional<long> n_a;
    std::optional<long> n_b;
    std::optional<std::string> gamma;
    std::optional<double> kappa1;
    std::optional<unsigned> threads;
    std::string artifact;
    std::string scenario;
    std::optional<long> n_min;
    std::optional<long> n_max;
    std::optional<long> step;
    bool no_calibrate = false;
};

std::array<double, 3> parse_gamma(const std::string& s) {
    std::array<double, 3> g{};
    std::stringstream ss(s);
    std::string item;
    std::size_t i = 0;
    while (std::getline(ss, item, ',')) {
        if (i == 3) break;
        try {
            std::size_t used = 0;
            g[i] = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw pd::ConfigError("--gamma: malformed value '" + item + "'");
        }
        ++i;
    }
    if (i != 3 || ss.rdbuf()->in_avail() != 0) throw pd::ConfigError("--gamma: expected three comma-separated values");
    return g;
}

void apply_thresholds(const Overrides& o, pd::Thresholds& t) {
    if (o.gamma) t.gamma = parse_gamma(*o.gamma);
    if (o.kappa1) t.kappa1 = *o.kappa1;
    t.validate();
}

std::string output_dir(const Overrides& o, const pd::DesignConfig& c) {
    if (o.out) return *o.out;
    if (const char* env = std::getenv("PLATDESIGN_OUT_DIR"); env && *env) return env;
    return c.output_dir;
}

pd::DesignConfig load_config(const Overrides& o) {
    if (o.config.empty()) throw pd::ConfigError("--config is required");
    pd::DesignConfig c = pd::parse_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.replicates) c.replicates = *o.replicates;
    if (o.method) {
        if (*o.method == "quadrature") {
            c.method = pd::TauMethod::quadrature();
        } else if (*o.method == "mc") {
            c.method = pd::TauMethod::monte_carlo(o.mc_draws.value_or(c.method.kind == pd::TauMethod::Kind::monte_carlo
                                                                         ? c.method.draws
                                                                         : 1000));
        } else {
            throw pd::ConfigError("--method: must be quadrature or mc");
        }
    } else if (o.mc_draws && c.method.kind == pd::TauMethod::Kind::monte_carlo) {
        c.method.draws = *o.mc_draws;
    }
    if (o.n_a) {
        c.n_a = *o.n_a;
        c.design.n_interim = *o.n_a;
    }
    if (o.n_b) c.n_b = *o.n_b;
    if (o.threads) c.parallelism = *o.threads;
    if (o.no_calibrate) c.calibrate_kappa1 = false;
    apply_thresholds(o, c.thresholds);
    c.validate();
    return c;
}

void progress(const std::string& s) { std::cerr << "[platdesign] " << s << "\n"; }

std::filesystem::path out_path(const Overrides& o, const pd::DesignConfig& c, const std::string& name) {
    return std::filesystem::path(output_dir(o, c)) / name;
}

void print_oc(const pd::OperatingCharacteristics& oc) {
    std::cout << "n_interim " << oc.n_interim << "  n_final " << oc.n_final << "\n";
    for (std::size_t j = 0; j < 3; ++j) std::cout << "  power arm " << j + 1 << ": " << oc.power[j] << "\n";
    std::cout << "  fwer_sum " << oc.fwer_sum << "  fwer_any " << oc.fwer_any << "\n";
}

int cmd_anchors(const Overrides& o) {
    const pd::DesignConfig c = load_config(o);
    const pd::Algorithm1Result res = pd::run_anchor_stage(c.algorithm1_inputs(), progress);
    const auto path = out_path(o, c, "anchors.artifact");
    pd::write_artifact(pd::make_artifact(c, res), path);
    std::cout << "kappa1 " << res.thresholds.kappa1 << "\n"
              << "anchors n_a " << res.models.n_a << "  n_b " << res.models.n_b << "\n"
              << "artifact " << path.string() << "\n";
    return 0;
}

int cmd_calibrate(const Overrides& o) {
    pd::TauSampleSet null_samples;
    pd::Thresholds base;
    double Gamma0 = 0.05;
    pd::FwerCriterion criterion = pd::FwerCriterion::sum;
    if (!o.artifact.empty()) {
        const pd::AnchorArtifact a = pd::read_artifact(o.artifact);
        if (!a.null_samples) throw pd::ConfigError("artifact carries no null samples; pass --config instead");
        null_samples = *a.null_samples;
        base = a.thresholds;
        apply_thresholds(o, base);
        Gamma0 = a.config.Gamma0;
        criterion = a.config.criterion;
    } else {
        const pd::DesignConfig c = load_config(o);
        const pd::ScenarioModel null_sc = c.scenario(c.null_scenario);
        progress("simulate " + null_sc.label + " at n_a = " + std::to_string(c.n_a));
        null_samples = pd::run_batch(c.design.at_interim(c.n_a), null_sc, c.priors(), c.replicates,
                                     pd::point_seed(pd::scenario_seed(c.seed, null_sc.label), c.n_a), c.threads(),
                                     c.method);
        base = c.thresholds;
        Gamma0 = c.Gamma0;
        criterion = c.criterion;
    }
    pd::Thresholds t = base;
    t.kappa1 = pd::calibrate_kappa1(null_samples, base, Gamma0, criterion);
    const pd::FwerEstimate f = pd::fwer_estimate(null_samples, t);
    std::cout << "kappa1 " << t.kappa1 << "\n"
              << "fwer_sum " << f.sum << "  fwer_any " << f.any << "  (target " << Gamma0 << ", "
              << pd::to_string(criterion) << ")\n";
    return 0;
}

pd::AnchorArtifact artifact_or_run(const Overrides& o, pd::DesignConfig& c_out) {
    if (!o.artifact.empty()) {
        pd::AnchorArtifact a = pd::read_artifact(o.artifact);
        apply_thresholds(o, a.thresholds);
        c_out = a.config;
        return a;
    }
    c_out = load_config(o);
    const pd::Algorithm1Result res = pd::run_anchor_stage(c_out.algorithm1_inputs(), progress);
    pd::AnchorArtifact a = pd::make_artifact(c_out, res);
    pd::write_artifact(a, out_path(o, c_out, "anchors.artifact"));
    return a;
}

int cmd_recommend(const Overrides& o) {
    pd::DesignConfig c;
    const pd::AnchorArtifact a = artifact_or_run(o, c);
    const long lo = o.n_min.value_or(c.search_lo);
    const long hi = o.n_max.value_or(c.search_hi);
    const pd::Recommendation r = pd::recommend_n(a.models, a.thresholds, c.Gamma1, lo, hi);
    const auto path = out_path(o, c, "recommendation.json");
    pd::write_file(path, pd::to_json(r).dump(2) + "\n");
    std::cout << "recommended n_interim " << r.n_interim << "  n_final " << r.n_final << "\n"
              << "thresholds gamma (" << r.thresholds.gamma[0] << ", " << r.thresholds.gamma[1] << ", "
              << r.thresholds.gamma[2] << ")  kappa1 " << r.thresholds.kappa1 << "\n";
    for (std::size_t j = 0; j < 3; ++j) std::cout << "  power arm " << j + 1 << ": " << r.power[j] << "\n";
    if (r.outside_validity_window) std::cout << "warning: recommended n lies outside the anchor validity window\n";
    std::cout << "report " << path.string() << "\n";
    return 0;
}

std::vector<long> grid_of(const Overrides& o, const pd::DesignConfig& c) {
    const long lo = o.n_min.value_or(c.grid_lo);
    const long hi = o.n_max.value_or(c.grid_hi);
    const long step = o.step.value_or(c.grid_step);
    if (lo <= 0 || hi < lo || step <= 0) throw pd::ConfigError("grid: need 0 < n_min <= n_max and step > 0");
    std::vector<long> g;
    for (long n = lo; n <= hi; n += step) g.push_back(n);
    return g;
}

int cmd_curves(const Overrides& o) {
    pd::DesignConfig c;
    const pd::AnchorArtifact a = artifact_or_run(o, c);
    const auto curve = pd::extrapolated_curve(a.models, grid_of(o, c), a.thresholds);
    const auto path = out_path(o, c, "curves_" + a.models.scenario + ".csv");
    pd::emit_curves(pd::curve_rows(curve, a.models.scenario, "estimated"), path);
    for (const auto& oc : curve) print_oc(oc);
    std::cout << "csv " << path.string() << "\n";
    return 0;
}

std::vector<pd::OperatingCharacteristics> simulate_curve(const pd::DesignConfig& c, const std::string& scenario,
                                                         const std::vector<long>& grid, const pd::Thresholds& t) {
    const pd::ScenarioModel sc = c.scenario(scenario);
    progress("simulate " + sc.label + " over " + std::to_string(grid.size()) + " grid points");
    return pd::oracle_curve(c.design, sc, c.priors(), grid, t, c.replicates, pd::scenario_seed(c.seed, sc.label),
                            c.threads(), c.method);
}

int cmd_oracle(const Overrides& o) {
    const pd::DesignConfig c = load_config(o);
    const std::string scenario = o.scenario.empty() ? c.alt_scenario : o.scenario;
    const auto curve = simulate_curve(c, scenario, grid_of(o, c), c.thresholds);
    const auto path = out_path(o, c, "oracle_" + scenario + ".csv");
    pd::emit_curves(pd::curve_rows(curve, scenario, "simulated"), path);
    for (const auto& oc : curve) print_oc(oc);
    std::cout << "csv " << path.string() << "\n";
    return 0;
}

int cmd_compare(const Overrides& o) {
    if (o.artifact.empty()) throw pd::ConfigError("compare needs --artifact");
    pd::AnchorArtifact a = pd::read_artifact(o.artifact);
    pd::DesignConfig c = o.config.empty() ? a.config : load_config(o);
    apply_thresholds(o, a.thresholds);
    const auto grid = grid_of(o, c);
    const auto est = pd::extrapolated_curve(a.models, grid, a.thresholds);
    const auto sim = simulate_curve(c, a.models.scenario, grid, a.thresholds);
    const pd::DiscrepancyReport rep = pd::compare_curves(sim, est);
    auto rows = pd::curve_rows(est, a.models.scenario, "estimated");
    const auto sim_rows = pd::curve_rows(sim, a.models.scenario, "simulated");
    rows.insert(rows.end(), sim_rows.begin(), sim_rows.end());
    pd::emit_curves(rows, out_path(o, c, "compare_" + a.models.scenario + ".csv"));
    pd::write_file(out_path(o, c, "compare_" + a.models.scenario + ".json"), pd::to_json(rep).dump(2) + "\n");
    for (std::size_t j = 0; j < 3; ++j) {
        std::cout << "arm " << j + 1 << ": max gap " << rep.max_gap[j] << "  mean gap " << rep.mean_gap[j] << "\n";
    }
    std::cout << rep.flagged.size() << " point(s) above tolerance " << rep.tolerance << "\n";
    return 0;
}

int cmd_table3(const Overrides& o) {
    const pd::DesignConfig c = load_config(o);
    pd::Table3Options opt;
    opt.design = c.design;
    opt.priors = c.priors();
    opt.thresholds = c.thresholds;
    opt.replicates = c.replicates;
    opt.seed = c.seed;
    opt.n_a = c.n_a;
    opt.n_b = c.n_b.value_or(pd::default_n_b(c.n_a, false));
    opt.report_n = c.report_n;
    opt.method = c.method;
    opt.parallelism = c.threads();
    const auto rows = pd::build_table3(opt, progress);
    const auto path = out_path(o, c, "table3.csv");
    pd::emit_table3(rows, path);
    std::cout << pd::table3_csv(rows) << "csv " << path.string() << "\n";
    return 0;
}

int cmd_serve(const std::vector<std::string>& artifacts, const std::string& host, int port) {
    pd::DesignService service;
    for (const auto& p : artifacts) {
        const std::string id = service.add(pd::read_artifact(p));
        std::cerr << "[platdesign] loaded " << p << " as " << id << "\n";
    }
    std::cerr << "[platdesign] listening on " << host << ":" << port << "\n";
    pd::serve(service, host, port);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sample size determination for Bayesian platform trials"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<std::string> serve_artifacts;
    std::string host = "127.0.0.1";
    int port = 8080;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "TOML design configuration");
        sub->add_option("--seed", o.seed, "Base seed");
        sub->add_option("--replicates", o.replicates, "Replicates per batch");
        sub->add_option("--method", o.method, "Tail probability method")->check(CLI::IsMember({"quadrature", "mc"}));
        sub->add_option("--mc-draws", o.mc_draws, "Posterior draws for --method mc");
        sub->add_option("--out", o.out, "Output directory (default $PLATDESIGN_OUT_DIR, then the config)");
        sub->add_option("--n-a", o.n_a, "First anchor interim size");
        sub->add_option("--n-b", o.n_b, "Second anchor interim size");
        sub->add_option("--gamma", o.gamma, "Interim thresholds a,b,c");
        sub->add_option("--kappa1", o.kappa1, "Final AE threshold");
        sub->add_option("--threads", o.threads, "Worker threads (0 = all)");
    };
    auto grid = [&](CLI::App* sub) {
        sub->add_option("--n-min", o.n_min, "Smallest interim size");
        sub->add_option("--n-max", o.n_max, "Largest interim size");
        sub->add_option("--step", o.step, "Grid step");
    };

    auto* anchors = app.add_subcommand("anchors", "Simulate anchors, calibrate kappa1, fit models, write artifact");
    common(anchors);
    anchors->add_flag("--no-calibrate", o.no_calibrate, "Keep the configured kappa1");
    auto* calibrate = app.add_subcommand("calibrate", "Calibrate kappa1 under the null scenario");
    common(calibrate);
    calibrate->add_option("--artifact", o.artifact, "Use the artifact's null samples");
    auto* recommend = app.add_subcommand("recommend", "Smallest n meeting the power target");
    common(recommend);
    grid(recommend);
    recommend->add_option("--artifact", o.artifact, "Anchor artifact (skips simulation)");
    recommend->add_flag("--no-calibrate", o.no_calibrate, "Keep the configured kappa1");
    auto* curves = app.add_subcommand("curves", "Extrapolated power curves as CSV");
    common(curves);
    grid(curves);
    curves->add_option("--artifact", o.artifact, "Anchor artifact (skips simulation)");
    auto* oracle = app.add_subcommand("oracle", "Directly simulated power curves as CSV");
    common(oracle);
    grid(oracle);
    oracle->add_option("--scenario", o.scenario, "Scenario name (default: the alternative)");
    auto* compare = app.add_subcommand("compare", "Extrapolated vs simulated curves");
    common(compare);
    grid(compare);
    compare->add_option("--artifact", o.artifact, "Anchor artifact")->required();
    auto* table3 = app.add_subcommand("table3", "Estimated and simulated probabilities per setting");
    common(table3);
    auto* serve = app.add_subcommand("serve", "HTTP service over anchor artifacts");
    serve->add_option("--port", port, "Port");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--artifact", serve_artifacts, "Artifacts to preload");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*anchors) return cmd_anchors(o);
        if (*calibrate) return cmd_calibrate(o);
        if (*recommend) return cmd_recommend(o);
        if (*curves) return cmd_curves(o);
        if (*oracle) return cmd_oracle(o);
        if (*compare) return cmd_compare(o);
        if (*table3) return cmd_table3(o);
        if (*serve) return cmd_serve(serve_artifacts, host, port);
    } catch (const pd::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << " (best " << e.best();
        if (e.best_n() >= 0) std::cerr << " at n = " << e.best_n();
        std::cerr << ")\n";
        return 2;
    } catch (const pd::ConfigError& e) {
        for (const auto& f : e.fields()) std::cerr << "error: " << f << "\n";
        return 1;
    } catch (const pd::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pd::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
