#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "platdesign/allocation.hpp"
#include "platdesign/trial_sim.hpp"

namespace platdesign {

/// Interim drop thresholds (per outcome) and the final outcome-1 threshold.
/// kappa23 are reported for display only and never drive a decision.
struct Thresholds {
    std::array<double, 3> gamma{0.2, 0.5, 0.5};
    double kappa1 = 0.975;
    std::array<double, 2> kappa23{0.99, 0.99};

    void validate() const;  // throws ConfigError naming the field
    friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

enum class FwerCriterion { sum, any };
std::string to_string(FwerCriterion c);
FwerCriterion fwer_criterion_from_string(const std::string& s);

struct OperatingCharacteristics {
    std::array<double, 3> power{};  // arms 1..3
    double fwer_sum = 0.0;          // per-arm exceedances summed over retained arms
    double fwer_any = 0.0;          // at least one exceedance
    std::array<double, 4> set_probs{};
    long n_interim = 0;
    long n_final = 0;
    Thresholds thresholds;
    std::size_t replicates = 0;
    bool extrapolated = false;
    bool outside_validity_window = false;

    double min_power() const noexcept;
    friend bool operator==(const OperatingCharacteristics&, const OperatingCharacteristics&) = default;
};

/// Arm j in {1,2} is kept iff tau_1jk <= gamma_k for every outcome.
ActiveSet active_set(const TauVector& tau, const Thresholds& thresholds);

std::array<double, 3> power_estimates(const TauSampleSet& samples, const Thresholds& thresholds);

struct FwerEstimate {
    double sum = 0.0;
    double any = 0.0;
    std::optional<std::string> warning;  // set when samples are not tagged null
};
FwerEstimate fwer_estimate(const TauSampleSet& samples, const Thresholds& thresholds);

std::array<double, 4> set_probabilities(const TauSampleSet& samples, const Thresholds& thresholds);

/// All operating characteristics in one pass over the replicates.
OperatingCharacteristics evaluate(const TauSampleSet& samples, const Thresholds& thresholds);

/// Smallest kappa1 among the distinct final outcome-1 tau values in (0,1)
/// and {0.9, 0.95, 0.975, 0.99} whose FWER is at most `Gamma0`.
/// Throws InfeasibleError carrying the smallest achievable FWER.
double calibrate_kappa1(const TauSampleSet& null_samples, const Thresholds& base, double Gamma0,
                        FwerCriterion criterion = FwerCriterion::sum);

}  // namespace platdesign
