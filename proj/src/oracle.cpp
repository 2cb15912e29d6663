#include "platdesign/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "platdesign/errors.hpp"

namespace platdesign {

std::vector<OperatingCharacteristics> oracle_curve(const TrialDesign& design, const ScenarioModel& scenario,
                                                   const PriorRegistry& priors, std::vector<long> n_grid,
                                                   const Thresholds& thresholds, std::size_t replicates,
                                                   std::uint64_t seed, unsigned parallelism, const TauMethod& method) {
    thresholds.validate();
    std::sort(n_grid.begin(), n_grid.end());
    n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
    std::vector<OperatingCharacteristics> out;
    out.reserve(n_grid.size());
    for (long n : n_grid) {
        const TrialDesign d = design.at_interim(n);
        const TauSampleSet s = run_batch(d, scenario, priors, replicates, point_seed(seed, n), parallelism, method);
        out.push_back(evaluate(s, thresholds));
    }
    return out;
}

DiscrepancyReport compare_curves(const std::vector<OperatingCharacteristics>& oracle,
                                 const std::vector<OperatingCharacteristics>& extrapolated, double tolerance) {
    if (oracle.size() != extrapolated.size()) throw ConfigError("compare_curves: grids differ in length");
    DiscrepancyReport rep;
    rep.tolerance = tolerance;
    for (std::size_t i = 0; i < oracle.size(); ++i) {
        const auto& o = oracle[i];
        const auto& e = extrapolated[i];
        if (o.n_interim != e.n_interim) {
            throw ConfigError("compare_curves: grid mismatch at position " + std::to_string(i) + " (n = " +
                              std::to_string(o.n_interim) + " vs " + std::to_string(e.n_interim) + ")");
        }
        if (!(o.thresholds == e.thresholds)) {
            throw ConfigError("compare_curves: thresholds differ at n = " + std::to_string(o.n_interim));
        }
        CurveGap g;
        g.n = o.n_interim;
        for (std::size_t j = 0; j < 3; ++j) {
            g.gap[j] = std::fabs(e.power[j] - o.power[j]);
            rep.max_gap[j] = std::max(rep.max_gap[j], g.gap[j]);
            rep.mean_gap[j] += g.gap[j];
            if (g.gap[j] > tolerance) rep.flagged.push_back({g.n, static_cast<int>(j) + 1, g.gap[j]});
        }
        rep.points.push_back(g);
    }
    if (!rep.points.empty()) {
        for (double& m : rep.mean_gap) m /= static_cast<double>(rep.points.size());
    }
    return rep;
}

}  // namespace platdesign
