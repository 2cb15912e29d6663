#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "platdesign/oc.hpp"
#include "platdesign/priors.hpp"
#include "platdesign/trial_sim.hpp"

namespace platdesign {

/// Logit-linear model of one tau component for one replicate. The anchor
/// logit is kept verbatim so evaluation at n_a is exact.
struct LogitLine {
    double slope = 0.0;
    double anchor_logit = 0.0;  // clamped logit at n_a

    friend bool operator==(const LogitLine&, const LogitLine&) = default;
};

struct ValidityWindow {
    long lo = 0;
    long hi = 0;
    bool contains(long n) const noexcept { return n >= lo && n <= hi; }
    friend bool operator==(const ValidityWindow&, const ValidityWindow&) = default;
};

/// Per-replicate, per-component lines fitted by pairing order statistics
/// of the two anchor samples. Replicates are keyed by the n_a sample.
struct AnchorModelSet {
    long n_a = 0;
    long n_b = 0;
    double c2 = 2.5;
    std::string scenario;
    Hypothesis hypothesis = Hypothesis::alternative;
    std::uint64_t seed_a = 0;
    std::uint64_t seed_b = 0;
    TauMethod method;
    double logit_eps = kDefaultLogitEps;
    std::vector<std::array<LogitLine, kTauLength>> lines;            // [replicate][component]
    std::vector<std::array<std::uint32_t, kTauLength>> partner_b;    // n_b replicate paired with [replicate][component]

    std::size_t replicates() const noexcept { return lines.size(); }
    double intercept(std::size_t r, std::size_t i) const noexcept {
        return lines[r][i].anchor_logit - lines[r][i].slope * static_cast<double>(n_a);
    }
    ValidityWindow validity_window() const noexcept;
    friend bool operator==(const AnchorModelSet&, const AnchorModelSet&) = default;
};

AnchorModelSet fit_anchor_models(const TauSampleSet& samples_a, const TauSampleSet& samples_b);

/// inv_logit of every line at n; the result is tagged extrapolated and
/// flags n outside the validity window.
TauSampleSet extrapolate(const AnchorModelSet& models, long n);

/// Extrapolated operating characteristics over a grid of interim sizes.
std::vector<OperatingCharacteristics> extrapolated_curve(const AnchorModelSet& models, const std::vector<long>& n_grid,
                                                         const Thresholds& thresholds);

struct SearchPoint {
    long n = 0;
    std::array<double, 3> power{};
    friend bool operator==(const SearchPoint&, const SearchPoint&) = default;
};

struct Recommendation {
    long n_interim = 0;
    long n_final = 0;
    Thresholds thresholds;
    std::array<double, 3> power{};
    std::vector<SearchPoint> trace;
    bool outside_validity_window = false;
};

/// Smallest n in [lo, hi] whose minimum per-arm extrapolated power reaches
/// Gamma1: a stride-25 scan, then a unit scan of the bracketing interval.
/// Throws InfeasibleError carrying the best (min power, n) seen.
Recommendation recommend_n(const AnchorModelSet& models, const Thresholds& thresholds, double Gamma1, long lo, long hi);

/// Simulation hook: (design at n, scenario, batch seed) -> samples. Lets
/// callers cache or replay batches.
using BatchFn = std::function<TauSampleSet(const TrialDesign&, const ScenarioModel&, std::uint64_t)>;

struct Algorithm1Inputs {
    TrialDesign design;
    ScenarioModel null_scenario;
    ScenarioModel alt_scenario;
    PriorRegistry priors;
    std::size_t replicates = 10000;
    std::uint64_t seed = 0;
    long n_a = 600;
    std::optional<long> n_b;
    long search_lo = 400;
    long search_hi = 1600;
    Thresholds thresholds;
    bool calibrate = true;
    double Gamma0 = 0.05;
    double Gamma1 = 0.95;
    FwerCriterion criterion = FwerCriterion::sum;
    TauMethod method = TauMethod::quadrature();
    unsigned parallelism = 1;
    BatchFn batch;  // empty: run_batch with the fields above
};

struct Algorithm1Result {
    Thresholds thresholds;
    Recommendation recommendation;
    TauSampleSet null_a;
    TauSampleSet alt_a;
    TauSampleSet alt_b;
    AnchorModelSet models;
};

/// Per-scenario base seed. Batches at interim size n use
/// point_seed(scenario_seed(base, label), n), so anchor runs and oracle grid
/// points at equal n coincide.
std::uint64_t scenario_seed(std::uint64_t base_seed, const std::string& scenario) noexcept;

/// Default second anchor: further out when power at n_a falls short.
long default_n_b(long n_a, bool power_short) noexcept;

/// Simulations at n_a and n_b, calibration and model fit; the
/// recommendation is left empty.
Algorithm1Result run_anchor_stage(const Algorithm1Inputs& in,
                                  const std::function<void(const std::string&)>& on_stage = {});

/// run_anchor_stage followed by the n search.
/// `on_stage` (optional) receives a short progress label.
Algorithm1Result run_algorithm1(const Algorithm1Inputs& in,
                                const std::function<void(const std::string&)>& on_stage = {});

}  // namespace platdesign
