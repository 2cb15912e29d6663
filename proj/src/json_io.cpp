#include "platdesign/json_io.hpp"

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

template <typename T, std::size_t N>
std::array<T, N> fixed(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != N) throw IoError(std::string("expected ") + std::to_string(N) + " entries in '" + what + "'");
    std::array<T, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<T>();
    return out;
}

Json profile_json(const RateProfile& p) {
    return Json{{"ae_prob", p.ae}, {"completion_prob", p.completion}, {"non_tolerability_prob", p.non_tolerability}};
}

}  // namespace

Json to_json(const TauMethod& m) {
    return Json{{"kind", m.kind == TauMethod::Kind::quadrature ? "quadrature" : "mc"},
                {"quadrature_order", m.quadrature_order},
                {"draws", m.draws}};
}

TauMethod tau_method_from_json(const Json& j) {
    TauMethod m;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "quadrature") {
        m.kind = TauMethod::Kind::quadrature;
    } else if (kind == "mc") {
        m.kind = TauMethod::Kind::monte_carlo;
    } else {
        throw IoError("unknown tau method '" + kind + "'");
    }
    m.quadrature_order = j.at("quadrature_order").get<int>();
    m.draws = j.at("draws").get<std::uint64_t>();
    return m;
}

Json to_json(const Thresholds& t) {
    return Json{{"gamma", t.gamma}, {"kappa1", t.kappa1}, {"kappa23", t.kappa23}};
}

Thresholds thresholds_from_json(const Json& j) {
    Thresholds t;
    t.gamma = fixed<double, 3>(j.at("gamma"), "gamma");
    t.kappa1 = j.at("kappa1").get<double>();
    t.kappa23 = fixed<double, 2>(j.at("kappa23"), "kappa23");
    return t;
}

Json to_json(const TauSampleSet& s) {
    Json tau = Json::array();
    for (const auto& v : s.replicates) tau.push_back(v.values);
    return Json{{"n_interim", s.n_interim},
                {"c2", s.c2},
                {"scenario", s.scenario},
                {"hypothesis", to_string(s.hypothesis)},
                {"seed", s.seed},
                {"method", to_json(s.method)},
                {"extrapolated", s.extrapolated},
                {"outside_validity_window", s.outside_validity_window},
                {"tau", std::move(tau)}};
}

TauSampleSet sample_set_from_json(const Json& j) {
    TauSampleSet s;
    s.n_interim = j.at("n_interim").get<long>();
    s.c2 = j.at("c2").get<double>();
    s.scenario = j.at("scenario").get<std::string>();
    s.hypothesis = hypothesis_from_string(j.at("hypothesis").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.method = tau_method_from_json(j.at("method"));
    s.extrapolated = j.at("extrapolated").get<bool>();
    s.outside_validity_window = j.at("outside_validity_window").get<bool>();
    const Json& tau = j.at("tau");
    s.replicates.resize(tau.size());
    for (std::size_t r = 0; r < tau.size(); ++r) {
        s.replicates[r].values = fixed<double, kTauLength>(tau[r], "tau");
        s.replicates[r].replicate = r;
    }
    return s;
}

Json to_json(const AnchorModelSet& m) {
    Json slope = Json::array();
    Json anchor = Json::array();
    Json partner = Json::array();
    for (std::size_t r = 0; r < m.replicates(); ++r) {
        std::array<double, kTauLength> s{};
        std::array<double, kTauLength> a{};
        for (std::size_t i = 0; i < static_cast<std::size_t>(kTauLength); ++i) {
            s[i] = m.lines[r][i].slope;
            a[i] = m.lines[r][i].anchor_logit;
        }
        slope.push_back(s);
        anchor.push_back(a);
        partner.push_back(m.partner_b[r]);
    }
    return Json{{"n_a", m.n_a},
                {"n_b", m.n_b},
                {"c2", m.c2},
                {"scenario", m.scenario},
                {"hypothesis", to_string(m.hypothesis)},
                {"seed_a", m.seed_a},
                {"seed_b", m.seed_b},
                {"method", to_json(m.method)},
                {"logit_eps", m.logit_eps},
                {"slope", std::move(slope)},
                {"anchor_logit", std::move(anchor)},
                {"partner_b", std::move(partner)}};
}

AnchorModelSet models_from_json(const Json& j) {
    AnchorModelSet m;
    m.n_a = j.at("n_a").get<long>();
    m.n_b = j.at("n_b").get<long>();
    m.c2 = j.at("c2").get<double>();
    m.scenario = j.at("scenario").get<std::string>();
    m.hypothesis = hypothesis_from_string(j.at("hypothesis").get<std::string>());
    m.seed_a = j.at("seed_a").get<std::uint64_t>();
    m.seed_b = j.at("seed_b").get<std::uint64_t>();
    m.method = tau_method_from_json(j.at("method"));
    m.logit_eps = j.at("logit_eps").get<double>();
    const Json& slope = j.at("slope");
    const Json& anchor = j.at("anchor_logit");
    const Json& partner = j.at("partner_b");
    if (anchor.size() != slope.size() || partner.size() != slope.size()) throw IoError("anchor model arrays differ in length");
    m.lines.resize(slope.size());
    m.partner_b.resize(slope.size());
    for (std::size_t r = 0; r < slope.size(); ++r) {
        const auto s = fixed<double, kTauLength>(slope[r], "slope");
        const auto a = fixed<double, kTauLength>(anchor[r], "anchor_logit");
        for (std::size_t i = 0; i < static_cast<std::size_t>(kTauLength); ++i) m.lines[r][i] = LogitLine{s[i], a[i]};
        m.partner_b[r] = fixed<std::uint32_t, kTauLength>(partner[r], "partner_b");
    }
    return m;
}

Json to_json(const DesignConfig& c) {
    Json hist = Json::array();
    for (const auto& h : c.historical.rows) {
        hist.push_back(Json{{"study", h.study},
                            {"regimen", h.regimen},
                            {"events_count", h.events},
                            {"total_count", h.total},
                            {"alpha", h.alpha},
                            {"beta", h.beta}});
    }
    Json profiles = Json::object();
    for (const auto& [name, p] : c.profiles) profiles[name] = profile_json(p);
    Json scenarios = Json::object();
    for (const auto& [name, s] : c.scenarios) {
        scenarios[name] = Json{{"arms", s.arms}, {"reference", s.reference}, {"hypothesis", to_string(s.hypothesis)}};
    }
    return Json{
        {"design",
         {{"c2_ratio", c.design.c2},
          {"lag_count", c.design.lag},
          {"stage1_ratio", c.design.stage1_ratio},
          {"lag_new_arm_share_prob", c.design.lag_new_arm_share},
          {"post_new_arm_share_prob", c.design.post_new_arm_share},
          {"margin_probs", c.design.margins}}},
        {"thresholds",
         {{"gamma_probs", c.thresholds.gamma},
          {"kappa1_prob", c.thresholds.kappa1},
          {"kappa23_probs", c.thresholds.kappa23},
          {"calibrate_kappa1", c.calibrate_kappa1},
          {"fwer_target_prob", c.Gamma0},
          {"power_target_prob", c.Gamma1},
          {"fwer_criterion", to_string(c.criterion)}}},
        {"prior",
         {{"w1_prob", c.w1},
          {"vague_alpha", c.vague.alpha},
          {"vague_beta", c.vague.beta},
          {"control_regimen", c.control_regimen},
          {"arm1_regimen", c.arm1_regimen},
          {"historical", std::move(hist)},
          {"relative_weights", c.relative_weights}}},
        {"profiles", std::move(profiles)},
        {"scenarios", std::move(scenarios)},
        {"simulation",
         {{"replicates_count", c.replicates},
          {"seed", c.seed},
          {"method", to_json(c.method)},
          {"parallelism_count", c.parallelism}}},
        {"anchors",
         {{"n_a_count", c.n_a},
          {"n_b_count", c.n_b ? Json(*c.n_b) : Json(nullptr)},
          {"null_scenario", c.null_scenario},
          {"alt_scenario", c.alt_scenario}}},
        {"search", {{"n_min_count", c.search_lo}, {"n_max_count", c.search_hi}}},
        {"curves",
         {{"n_min_count", c.grid_lo},
          {"n_max_count", c.grid_hi},
          {"n_step_count", c.grid_step},
          {"report_n_count", c.report_n}}},
        {"output", {{"dir", c.output_dir}}},
    };
}

DesignConfig config_from_json(const Json& j) {
    DesignConfig c;
    const Json& d = j.at("design");
    c.design.c2 = d.at("c2_ratio").get<double>();
    c.design.lag = d.at("lag_count").get<long>();
    c.design.stage1_ratio = fixed<double, 3>(d.at("stage1_ratio"), "stage1_ratio");
    c.design.lag_new_arm_share = d.at("lag_new_arm_share_prob").get<double>();
    c.design.post_new_arm_share = d.at("post_new_arm_share_prob").get<double>();
    c.design.margins = fixed<double, 3>(d.at("margin_probs"), "margin_probs");

    const Json& t = j.at("thresholds");
    c.thresholds.gamma = fixed<double, 3>(t.at("gamma_probs"), "gamma_probs");
    c.thresholds.kappa1 = t.at("kappa1_prob").get<double>();
    c.thresholds.kappa23 = fixed<double, 2>(t.at("kappa23_probs"), "kappa23_probs");
    c.calibrate_kappa1 = t.at("calibrate_kappa1").get<bool>();
    c.Gamma0 = t.at("fwer_target_prob").get<double>();
    c.Gamma1 = t.at("power_target_prob").get<double>();
    c.criterion = fwer_criterion_from_string(t.at("fwer_criterion").get<std::string>());

    const Json& p = j.at("prior");
    c.w1 = p.at("w1_prob").get<double>();
    c.vague = BetaParams(p.at("vague_alpha").get<double>(), p.at("vague_beta").get<double>());
    c.control_regimen = p.at("control_regimen").get<std::string>();
    c.arm1_regimen = p.at("arm1_regimen").get<std::string>();
    for (const auto& h : p.at("historical")) {
        c.historical.rows.push_back(HistoricalRow{h.at("study").get<std::string>(), h.at("regimen").get<std::string>(),
                                                  h.at("events_count").get<long>(), h.at("total_count").get<long>(),
                                                  h.at("alpha").get<double>(), h.at("beta").get<double>()});
    }
    c.relative_weights = p.at("relative_weights").get<std::map<std::string, std::vector<double>>>();

    for (const auto& [name, v] : j.at("profiles").items()) {
        c.profiles[name] = RateProfile{v.at("ae_prob").get<double>(), v.at("completion_prob").get<double>(),
                                       v.at("non_tolerability_prob").get<double>()};
    }
    for (const auto& [name, v] : j.at("scenarios").items()) {
        ScenarioSpec s;
        s.arms = fixed<std::string, 3>(v.at("arms"), "arms");
        s.reference = v.at("reference").get<std::string>();
        s.hypothesis = hypothesis_from_string(v.at("hypothesis").get<std::string>());
        c.scenarios[name] = s;
    }

    const Json& sim = j.at("simulation");
    c.replicates = sim.at("replicates_count").get<std::size_t>();
    c.seed = sim.at("seed").get<std::uint64_t>();
    c.method = tau_method_from_json(sim.at("method"));
    c.parallelism = sim.at("parallelism_count").get<unsigned>();

    const Json& a = j.at("anchors");
    c.n_a = a.at("n_a_count").get<long>();
    if (!a.at("n_b_count").is_null()) c.n_b = a.at("n_b_count").get<long>();
    c.null_scenario = a.at("null_scenario").get<std::string>();
    c.alt_scenario = a.at("alt_scenario").get<std::string>();
    c.design.n_interim = c.n_a;

    c.search_lo = j.at("search").at("n_min_count").get<long>();
    c.search_hi = j.at("search").at("n_max_count").get<long>();
    const Json& cv = j.at("curves");
    c.grid_lo = cv.at("n_min_count").get<long>();
    c.grid_hi = cv.at("n_max_count").get<long>();
    c.grid_step = cv.at("n_step_count").get<long>();
    c.report_n = cv.at("report_n_count").get<long>();
    c.output_dir = j.at("output").at("dir").get<std::string>();
    return c;
}

Json to_json(const OperatingCharacteristics& oc) {
    return Json{{"power", oc.power},
                {"fwer_sum", oc.fwer_sum},
                {"fwer_any", oc.fwer_any},
                {"set_probs", oc.set_probs},
                {"n_interim", oc.n_interim},
                {"n_final", oc.n_final},
                {"thresholds", to_json(oc.thresholds)},
                {"replicates", oc.replicates},
                {"extrapolated", oc.extrapolated},
                {"outside_validity_window", oc.outside_validity_window}};
}

Json to_json(const Recommendation& r) {
    Json trace = Json::array();
    for (const auto& p : r.trace) trace.push_back(Json{{"n", p.n}, {"power", p.power}});
    return Json{{"n_interim", r.n_interim},
                {"n_final", r.n_final},
                {"thresholds", to_json(r.thresholds)},
                {"power", r.power},
                {"outside_validity_window", r.outside_validity_window},
                {"trace", std::move(trace)}};
}

Json to_json(const DiscrepancyReport& r) {
    Json pts = Json::array();
    for (const auto& g : r.points) pts.push_back(Json{{"n", g.n}, {"gap", g.gap}});
    Json flags = Json::array();
    for (const auto& f : r.flagged) flags.push_back(Json{{"n", f.n}, {"arm", f.arm}, {"gap", f.gap}});
    return Json{{"points", std::move(pts)},
                {"max_gap", r.max_gap},
                {"mean_gap", r.mean_gap},
                {"tolerance", r.tolerance},
                {"flagged", std::move(flags)}};
}

}  // namespace platdesign
