#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "platdesign/oc.hpp"
#include "platdesign/priors.hpp"
#include "platdesign/trial_sim.hpp"

namespace platdesign {

/// Direct simulation at every grid point, each with its own batch seed
/// point_seed(seed, n). Results are ordered by n.
std::vector<OperatingCharacteristics> oracle_curve(const TrialDesign& design, const ScenarioModel& scenario,
                                                   const PriorRegistry& priors, std::vector<long> n_grid,
                                                   const Thresholds& thresholds, std::size_t replicates,
                                                   std::uint64_t seed, unsigned parallelism = 1,
                                                   const TauMethod& method = TauMethod::quadrature());

struct CurveGap {
    long n = 0;
    std::array<double, 3> gap{};  // |extrapolated - oracle| power per arm
};

struct DiscrepancyReport {
    std::vector<CurveGap> points;
    std::array<double, 3> max_gap{};
    std::array<double, 3> mean_gap{};
    double tolerance = 0.03;
    struct Flag {
        long n;
        int arm;
        double gap;
    };
    std::vector<Flag> flagged;
};

/// Per-arm, per-n absolute power gaps. Grids must match point for point.
DiscrepancyReport compare_curves(const std::vector<OperatingCharacteristics>& oracle,
                                 const std::vector<OperatingCharacteristics>& extrapolated, double tolerance = 0.03);

}  // namespace platdesign
