#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "platdesign/oc.hpp"
#include "platdesign/priors.hpp"
#include "platdesign/ssd.hpp"
#include "platdesign/trial_sim.hpp"

namespace platdesign {

struct ScenarioSpec {
    std::array<std::string, 3> arms;  // profile names for arms 1..3
    std::string reference = "reference";
    Hypothesis hypothesis = Hypothesis::alternative;

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct DesignConfig {
    TrialDesign design;  // n_interim mirrors anchors.n_a_count
    Thresholds thresholds;
    bool calibrate_kappa1 = true;
    double Gamma0 = 0.05;
    double Gamma1 = 0.95;
    FwerCriterion criterion = FwerCriterion::sum;

    HistoricalTable historical;
    std::map<std::string, std::vector<double>> relative_weights;  // per regimen; absent means equal
    double w1 = 0.5;
    BetaParams vague{1.0, 1.0};
    std::string control_regimen = "4R10";
    std::string arm1_regimen = "2R20";

    std::map<std::string, RateProfile> profiles;
    std::map<std::string, ScenarioSpec> scenarios;
    std::string null_scenario = "psi0";
    std::string alt_scenario = "psi1";

    TauMethod method = TauMethod::quadrature();
    std::size_t replicates = 10000;
    std::uint64_t seed = 0;
    unsigned parallelism = 0;  // 0 = hardware concurrency

    long n_a = 600;
    std::optional<long> n_b;
    long search_lo = 400;
    long search_hi = 1600;
    long grid_lo = 400;
    long grid_hi = 1200;
    long grid_step = 100;
    long report_n = 674;  // interim size for table exports

    std::string output_dir = "out";

    /// Cross-field checks; throws ConfigError with one entry per problem.
    void validate() const;

    PriorRegistry priors() const;
    ScenarioModel scenario(const std::string& name) const;
    std::vector<long> grid() const;
    unsigned threads() const;
    Algorithm1Inputs algorithm1_inputs() const;

    friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

/// Strict parse: unknown keys, wrong types, missing required fields and
/// constraint violations are all reported, each naming its field.
DesignConfig parse_config(const std::filesystem::path& path);
DesignConfig parse_config_string(std::string_view text, const std::string& source = "<string>");

}  // namespace platdesign
