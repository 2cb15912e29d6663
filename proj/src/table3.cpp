#include "platdesign/table3.hpp"

#include <map>
#include <utility>

namespace platdesign {

namespace {

std::string pretty(const std::string& profile) {
    if (profile == "clearly_acceptable") return "Clearly Acceptable";
    if (profile == "acceptable") return "Acceptable";
    if (profile == "barely_acceptable") return "Barely Acceptable";
    if (profile == "unacceptable") return "Unacceptable";
    return profile;
}

Table3Setting make_setting(int treatment, const std::string& a1, const std::string& a2) {
    Table3Setting s;
    s.treatment = treatment;
    s.arms = {a1, a2, "clearly_acceptable"};
    if (treatment == 1) {
        s.label = "1LP " + pretty(a2);
    } else if (treatment == 2) {
        s.label = "2R20 " + pretty(a1);
    } else if (a1 == a2) {
        s.label = "2R20 and 1LP " + pretty(a1);
    } else {
        s.label = "2R20 " + pretty(a1) + " / 1LP " + pretty(a2);
    }
    return s;
}

}  // namespace

const std::vector<Table3Setting>& table3_settings() {
    static const std::vector<Table3Setting> settings = [] {
        const std::string ca = "clearly_acceptable";
        const std::string un = "unacceptable";
        return std::vector<Table3Setting>{
            make_setting(1, ca, ca), make_setting(1, ca, un), make_setting(2, ca, ca), make_setting(2, un, ca),
            make_setting(3, ca, ca), make_setting(3, ca, un), make_setting(3, un, ca), make_setting(3, un, un),
        };
    }();
    return settings;
}

std::string table3_scenario_label(const std::array<std::string, 3>& arms) {
    return "table3:" + arms[0] + "/" + arms[1] + "/" + arms[2];
}

std::vector<Table3Row> build_table3(const Table3Options& opt, const std::function<void(const std::string&)>& on_stage) {
    opt.thresholds.validate();
    std::map<std::pair<std::string, long>, TauSampleSet> cache;
    auto samples = [&](const ScenarioModel& sc, long n) -> const TauSampleSet& {
        const auto key = std::make_pair(sc.label, n);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        if (on_stage) on_stage("simulate " + sc.label + " at n = " + std::to_string(n));
        const TrialDesign d = opt.design.at_interim(n);
        const std::uint64_t seed = point_seed(scenario_seed(opt.seed, sc.label), n);
        TauSampleSet s = opt.batch ? opt.batch(d, sc, seed)
                                   : run_batch(d, sc, opt.priors, opt.replicates, seed, opt.parallelism, opt.method);
        return cache.emplace(key, std::move(s)).first->second;
    };

    std::vector<Table3Row> rows;
    for (const auto& setting : table3_settings()) {
        Table3Row est{kArmNames[static_cast<std::size_t>(setting.treatment - 1)], setting.label, "estimated", {}};
        Table3Row sim{est.treatment, setting.label, "simulated", {}};
        for (std::size_t c = 0; c < kTable3Profiles.size(); ++c) {
            std::array<std::string, 3> arms = setting.arms;
            arms[static_cast<std::size_t>(setting.treatment - 1)] = kTable3Profiles[c];
            const bool all_null = arms[0] == "unacceptable" && arms[1] == "unacceptable" && arms[2] == "unacceptable";
            const ScenarioModel sc = ScenarioModel::from_profile_names(
                table3_scenario_label(arms), arms, all_null ? Hypothesis::null : Hypothesis::alternative);
            const std::size_t j = static_cast<std::size_t>(setting.treatment - 1);

            const AnchorModelSet models = fit_anchor_models(samples(sc, opt.n_a), samples(sc, opt.n_b));
            est.probability[c] = power_estimates(extrapolate(models, opt.report_n), opt.thresholds)[j];
            sim.probability[c] = power_estimates(samples(sc, opt.report_n), opt.thresholds)[j];
        }
        rows.push_back(std::move(est));
        rows.push_back(std::move(sim));
    }
    return rows;
}

}  // namespace platdesign
