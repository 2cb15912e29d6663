#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "platdesign/report.hpp"
#include "platdesign/ssd.hpp"

namespace platdesign {

inline constexpr std::array<const char*, 3> kArmNames = {"2R20", "1LP", "Trt3"};
inline constexpr std::array<const char*, 4> kTable3Profiles = {"clearly_acceptable", "acceptable", "barely_acceptable",
                                                               "unacceptable"};

/// One row pair: the treatment whose probability is reported and the fixed
/// profiles of the other arms (the treatment's own entry is ignored).
struct Table3Setting {
    int treatment = 1;  // 1..3
    std::array<std::string, 3> arms;
    std::string label;
};

/// The 8 settings in display order: 2R20 under 1LP {CA, U}; 1LP under 2R20
/// {CA, U}; Trt3 under the four (2R20, 1LP) combinations. Arms not named
/// in a setting stay clearly acceptable.
const std::vector<Table3Setting>& table3_settings();

/// Label of the scenario with the given experimental-arm profiles.
std::string table3_scenario_label(const std::array<std::string, 3>& arms);

struct Table3Options {
    TrialDesign design;
    PriorRegistry priors;
    Thresholds thresholds;
    std::size_t replicates = 10000;
    std::uint64_t seed = 0;
    long n_a = 600;
    long n_b = 1000;
    long report_n = 674;
    TauMethod method = TauMethod::quadrature();
    unsigned parallelism = 1;
    BatchFn batch;  // empty: run_batch
};

/// Estimated (anchors n_a, n_b extrapolated to report_n) and simulated
/// (direct batch at report_n) rows, 16 in total.
std::vector<Table3Row> build_table3(const Table3Options& opt,
                                    const std::function<void(const std::string&)>& on_stage = {});

}  // namespace platdesign
