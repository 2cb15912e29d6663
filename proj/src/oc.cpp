#include "platdesign/oc.hpp"

#include <algorithm>
#include <cmath>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

constexpr std::array<double, 4> kFixedKappaCandidates = {0.9, 0.95, 0.975, 0.99};

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

struct Counts {
    std::array<std::size_t, 3> success{};
    std::size_t exceed_total = 0;
    std::size_t exceed_any = 0;
    std::array<std::size_t, 4> sets{};
};

Counts count(const TauSampleSet& samples, const Thresholds& t) {
    Counts c;
    for (const auto& tau : samples.replicates) {
        const ActiveSet s = active_set(tau, t);
        ++c.sets[static_cast<std::size_t>(s.index())];
        int hits = 0;
        for (int j = 1; j <= 3; ++j) {
            if (!s.contains(j)) continue;
            if (tau.final_prob(s, j, 0) > t.kappa1) {
                ++c.success[static_cast<std::size_t>(j - 1)];
                ++hits;
            }
        }
        c.exceed_total += static_cast<std::size_t>(hits);
        if (hits > 0) ++c.exceed_any;
    }
    return c;
}

double frac(std::size_t k, std::size_t r) { return static_cast<double>(k) / static_cast<double>(r); }

void require_replicates(const TauSampleSet& samples) {
    if (samples.replicates.empty()) throw DomainError("sample set has no replicates");
}

}  // namespace

void Thresholds::validate() const {
    std::vector<std::string> errs;
    for (double g : gamma) {
        if (!in_open_unit(g)) {
            errs.push_back("gamma_probs entries must lie in (0, 1)");
            break;
        }
    }
    if (!in_open_unit(kappa1)) errs.push_back("kappa1_prob must lie in (0, 1)");
    for (double k : kappa23) {
        if (!in_open_unit(k)) {
            errs.push_back("kappa23_probs entries must lie in (0, 1)");
            break;
        }
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
}

std::string to_string(FwerCriterion c) { return c == FwerCriterion::sum ? "sum" : "any"; }

FwerCriterion fwer_criterion_from_string(const std::string& s) {
    if (s == "sum") return FwerCriterion::sum;
    if (s == "any") return FwerCriterion::any;
    throw ConfigError("fwer_criterion must be 'sum' or 'any', got '" + s + "'");
}

double OperatingCharacteristics::min_power() const noexcept { return *std::min_element(power.begin(), power.end()); }

ActiveSet active_set(const TauVector& tau, const Thresholds& t) {
    bool keep[2] = {true, true};
    for (int j = 1; j <= 2; ++j) {
        for (int k = 0; k < 3; ++k) {
            if (tau.interim(j, k) > t.gamma[static_cast<std::size_t>(k)]) keep[j - 1] = false;
        }
    }
    return ActiveSet(keep[0], keep[1]);
}

std::array<double, 3> power_estimates(const TauSampleSet& samples, const Thresholds& t) {
    require_replicates(samples);
    const Counts c = count(samples, t);
    const std::size_t r = samples.size();
    return {frac(c.success[0], r), frac(c.success[1], r), frac(c.success[2], r)};
}

FwerEstimate fwer_estimate(const TauSampleSet& samples, const Thresholds& t) {
    require_replicates(samples);
    const Counts c = count(samples, t);
    FwerEstimate out;
    out.sum = frac(c.exceed_total, samples.size());
    out.any = frac(c.exceed_any, samples.size());
    if (samples.hypothesis != Hypothesis::null) {
        out.warning = "FWER evaluated on samples tagged '" + to_string(samples.hypothesis) + "' (scenario '" +
                      samples.scenario + "')";
    }
    return out;
}

std::array<double, 4> set_probabilities(const TauSampleSet& samples, const Thresholds& t) {
    require_replicates(samples);
    std::array<std::size_t, 4> sets{};
    for (const auto& tau : samples.replicates) ++sets[static_cast<std::size_t>(active_set(tau, t).index())];
    const std::size_t r = samples.size();
    return {frac(sets[0], r), frac(sets[1], r), frac(sets[2], r), frac(sets[3], r)};
}

OperatingCharacteristics evaluate(const TauSampleSet& samples, const Thresholds& t) {
    require_replicates(samples);
    const Counts c = count(samples, t);
    const std::size_t r = samples.size();
    OperatingCharacteristics oc;
    for (std::size_t j = 0; j < 3; ++j) oc.power[j] = frac(c.success[j], r);
    oc.fwer_sum = frac(c.exceed_total, r);
    oc.fwer_any = frac(c.exceed_any, r);
    for (std::size_t s = 0; s < 4; ++s) oc.set_probs[s] = frac(c.sets[s], r);
    oc.n_interim = samples.n_interim;
    oc.n_final = std::lround(samples.c2 * static_cast<double>(samples.n_interim));
    oc.thresholds = t;
    oc.replicates = r;
    oc.extrapolated = samples.extrapolated;
    oc.outside_validity_window = samples.outside_validity_window;
    return oc;
}

double calibrate_kappa1(const TauSampleSet& null_samples, const Thresholds& base, double Gamma0,
                        FwerCriterion criterion) {
    require_replicates(null_samples);
    if (!(Gamma0 >= 0.0) || !std::isfinite(Gamma0)) throw DomainError("Gamma0 must be a finite non-negative target");
    std::vector<double> grid(kFixedKappaCandidates.begin(), kFixedKappaCandidates.end());
    const auto& layout = tau_layout();
    for (const auto& tau : null_samples.replicates) {
        for (std::size_t i = kInterimLength; i < static_cast<std::size_t>(kTauLength); ++i) {
            if (layout[i].outcome == 0 && in_open_unit(tau.values[i])) grid.push_back(tau.values[i]);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto fwer_at = [&](double kappa) {
        Thresholds t = base;
        t.kappa1 = kappa;
        const FwerEstimate f = fwer_estimate(null_samples, t);
        return criterion == FwerCriterion::sum ? f.sum : f.any;
    };

    // FWER is non-increasing in kappa1, so the feasible candidates form a suffix.
    std::size_t lo = 0;
    std::size_t hi = grid.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (fwer_at(grid[mid]) <= Gamma0) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if (lo == grid.size()) {
        const double best = fwer_at(grid.back());
        throw InfeasibleError("no kappa1 candidate keeps the " + to_string(criterion) + " FWER at or below " +
                                  std::to_string(Gamma0) + "; smallest achievable is " + std::to_string(best),
                              best);
    }
    return grid[lo];
}

}  // namespace platdesign
