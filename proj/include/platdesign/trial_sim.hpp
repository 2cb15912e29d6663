#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "platdesign/allocation.hpp"
#include "platdesign/inference.hpp"
#include "platdesign/priors.hpp"

namespace platdesign {

enum class Hypothesis { null, alternative };
std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(const std::string& s);

/// Marginal outcome rates as a trial reports them: the AE rate, the
/// completion rate, and the non-tolerability rate.
struct RateProfile {
    double ae = 0.02;
    double completion = 0.75;
    double non_tolerability = 0.25;

    friend bool operator==(const RateProfile&, const RateProfile&) = default;
};

/// Named profiles: reference, clearly_acceptable, acceptable,
/// barely_acceptable, unacceptable.
const std::map<std::string, RateProfile>& standard_profiles();

/// Point-mass design prior: modeled event probabilities theta[arm][outcome]
/// for outcomes (AE, non-completion, non-tolerability).
struct ScenarioModel {
    std::array<std::array<double, 3>, 4> theta{};
    std::string label;
    Hypothesis hypothesis = Hypothesis::alternative;

    void validate() const;

    /// Completion rates enter as 1 - completion.
    static ScenarioModel from_profiles(std::string label, const std::array<RateProfile, 4>& arms,
                                       Hypothesis hypothesis);
    /// Control at `reference`, experimental arms 1..3 at the named profiles.
    static ScenarioModel from_profile_names(std::string label, const std::array<std::string, 3>& experimental,
                                            Hypothesis hypothesis, const std::string& reference = "reference");
};

inline constexpr int kTauLength = 30;
inline constexpr int kInterimLength = 6;

/// Position of one tau component within the 30-vector.
struct TauSlot {
    bool interim = false;
    ActiveSet set;  // final components only
    int arm = 0;
    int outcome = 0;  // 0-based: 0 AE, 1 non-completion, 2 non-tolerability
    std::string name() const;
};

/// Interim entries first (arms 1..2 x outcomes, arm-major); then final
/// non-inferiority entries for sets {}, {1}, {2}, {1,2}, arms {3} u s
/// ascending, outcomes ascending.
const std::array<TauSlot, kTauLength>& tau_layout();
int interim_index(int arm, int outcome);
int final_index(ActiveSet s, int arm, int outcome);

struct TauVector {
    std::array<double, kTauLength> values{};
    std::uint64_t replicate = 0;

    double interim(int arm, int outcome) const { return values[static_cast<std::size_t>(interim_index(arm, outcome))]; }
    double final_prob(ActiveSet s, int arm, int outcome) const {
        return values[static_cast<std::size_t>(final_index(s, arm, outcome))];
    }
    friend bool operator==(const TauVector&, const TauVector&) = default;
};

struct TauSampleSet {
    long n_interim = 0;
    double c2 = 2.5;
    std::string scenario;
    Hypothesis hypothesis = Hypothesis::alternative;
    std::vector<TauVector> replicates;
    std::uint64_t seed = 0;
    TauMethod method;
    bool extrapolated = false;
    bool outside_validity_window = false;

    std::size_t size() const noexcept { return replicates.size(); }
    friend bool operator==(const TauSampleSet&, const TauSampleSet&) = default;
};

/// Per-arm, per-outcome cumulative event counts for one replicate. Data at
/// a smaller sample size is always a prefix of data at a larger one.
struct ReplicateData {
    std::array<std::array<std::vector<int>, 3>, 4> cumulative;  // [arm][outcome][m] = events among first m

    int events(int arm, int outcome, long m) const {
        return cumulative[static_cast<std::size_t>(arm)][static_cast<std::size_t>(outcome)].at(static_cast<std::size_t>(m));
    }
};

ReplicateData simulate_data(const TrialDesign& design, const ScenarioModel& scenario, std::uint64_t replicate_key);

/// Tau vector computed from already-simulated data.
TauVector compute_tau(const TrialDesign& design, const PriorRegistry& priors, const ReplicateData& data,
                      const TauMethod& method, std::uint64_t replicate_key);

/// One synthetic trial: data plus the full tau vector. `replicate_key`
/// determines every random draw.
TauVector simulate_replicate(const TrialDesign& design, const ScenarioModel& scenario, const PriorRegistry& priors,
                             const TauMethod& method, std::uint64_t replicate_key);

/// Key of replicate r in a batch seeded with `seed`.
std::uint64_t replicate_key(std::uint64_t seed, std::uint64_t r) noexcept;

/// Batch seed for a simulation at interim size n, derived from a base seed.
std::uint64_t point_seed(std::uint64_t base_seed, long n) noexcept;

TauSampleSet run_batch(const TrialDesign& design, const ScenarioModel& scenario, const PriorRegistry& priors,
                       std::size_t replicates, std::uint64_t seed, unsigned parallelism = 1,
                       const TauMethod& method = TauMethod::quadrature());

}  // namespace platdesign
