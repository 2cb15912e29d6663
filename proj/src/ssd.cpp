#include "platdesign/ssd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

constexpr long kCoarseStride = 25;

std::vector<std::uint32_t> rank_order(const std::vector<double>& logits) {
    std::vector<std::uint32_t> order(logits.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (logits[a] != logits[b]) return logits[a] < logits[b];
        return a < b;
    });
    return order;
}

void check_compatible(const TauSampleSet& a, const TauSampleSet& b) {
    std::vector<std::string> errs;
    if (a.scenario != b.scenario) errs.push_back("anchor samples come from different scenarios ('" + a.scenario + "', '" + b.scenario + "')");
    if (a.hypothesis != b.hypothesis) errs.push_back("anchor samples carry different hypothesis tags");
    if (a.size() != b.size()) errs.push_back("anchor samples differ in replicate count");
    if (a.c2 != b.c2) errs.push_back("anchor samples differ in c2_ratio");
    if (!(a.method == b.method)) errs.push_back("anchor samples differ in tau method");
    if (a.extrapolated || b.extrapolated) errs.push_back("anchor samples must be simulated, not extrapolated");
    if (!errs.empty()) throw ConfigError(std::move(errs));
    if (a.replicates.empty()) throw ConfigError("anchor samples are empty");
}

std::uint64_t fnv1a(const std::string& s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

ValidityWindow AnchorModelSet::validity_window() const noexcept {
    const long gap = std::abs(n_b - n_a);
    const long lo = std::min(n_a, n_b);
    const long hi = std::max(n_a, n_b);
    // gap / 2 rounds toward the anchors, keeping the window inside the stated bound.
    return ValidityWindow{lo - gap / 2, hi + (3 * gap) / 2};
}

AnchorModelSet fit_anchor_models(const TauSampleSet& samples_a, const TauSampleSet& samples_b) {
    if (samples_a.n_interim == samples_b.n_interim) throw DomainError("fit_anchor_models: n_a and n_b must differ");
    check_compatible(samples_a, samples_b);

    AnchorModelSet m;
    m.n_a = samples_a.n_interim;
    m.n_b = samples_b.n_interim;
    m.c2 = samples_a.c2;
    m.scenario = samples_a.scenario;
    m.hypothesis = samples_a.hypothesis;
    m.seed_a = samples_a.seed;
    m.seed_b = samples_b.seed;
    m.method = samples_a.method;
    m.logit_eps = samples_a.method.logit_eps();

    const std::size_t R = samples_a.size();
    m.lines.resize(R);
    m.partner_b.resize(R);
    const double dn = static_cast<double>(m.n_b - m.n_a);
    std::vector<double> la(R);
    std::vector<double> lb(R);
    for (std::size_t i = 0; i < static_cast<std::size_t>(kTauLength); ++i) {
        for (std::size_t r = 0; r < R; ++r) {
            la[r] = logit_clamped(samples_a.replicates[r].values[i], m.logit_eps);
            lb[r] = logit_clamped(samples_b.replicates[r].values[i], m.logit_eps);
        }
        const auto oa = rank_order(la);
        const auto ob = rank_order(lb);
        for (std::size_t d = 0; d < R; ++d) {
            const std::uint32_t ra = oa[d];
            const std::uint32_t rb = ob[d];
            m.lines[ra][i] = LogitLine{(lb[rb] - la[ra]) / dn, la[ra]};
            m.partner_b[ra][i] = rb;
        }
    }
    return m;
}

TauSampleSet extrapolate(const AnchorModelSet& models, long n) {
    if (n <= 0) throw DomainError("extrapolate: n must be positive");
    TauSampleSet out;
    out.n_interim = n;
    out.c2 = models.c2;
    out.scenario = models.scenario;
    out.hypothesis = models.hypothesis;
    out.seed = models.seed_a;
    out.method = models.method;
    out.extrapolated = true;
    out.outside_validity_window = !models.validity_window().contains(n);
    out.replicates.resize(models.replicates());
    const double dn = static_cast<double>(n - models.n_a);
    for (std::size_t r = 0; r < models.replicates(); ++r) {
        auto& tau = out.replicates[r];
        tau.replicate = r;
        const auto& row = models.lines[r];
        for (std::size_t i = 0; i < static_cast<std::size_t>(kTauLength); ++i) {
            tau.values[i] = inv_logit(row[i].anchor_logit + row[i].slope * dn);
        }
    }
    return out;
}

std::vector<OperatingCharacteristics> extrapolated_curve(const AnchorModelSet& models, const std::vector<long>& n_grid,
                                                         const Thresholds& thresholds) {
    std::vector<OperatingCharacteristics> out;
    out.reserve(n_grid.size());
    for (long n : n_grid) out.push_back(evaluate(extrapolate(models, n), thresholds));
    return out;
}

Recommendation recommend_n(const AnchorModelSet& models, const Thresholds& thresholds, double Gamma1, long lo, long hi) {
    thresholds.validate();
    if (lo <= 0 || hi < lo) throw DomainError("recommend_n: search range must satisfy 0 < lo <= hi");

    Recommendation rec;
    rec.thresholds = thresholds;
    const ValidityWindow w = models.validity_window();

    double best_power = -1.0;
    long best_n = lo;
    auto probe = [&](long n) {
        const auto p = power_estimates(extrapolate(models, n), thresholds);
        rec.trace.push_back(SearchPoint{n, p});
        const double m = std::min({p[0], p[1], p[2]});
        if (m > best_power) {
            best_power = m;
            best_n = n;
        }
        return m >= Gamma1;
    };
    auto accept = [&](long n) {
        rec.n_interim = n;
        rec.n_final = std::lround(models.c2 * static_cast<double>(n));
        rec.outside_validity_window = !w.contains(n);
        for (auto it = rec.trace.rbegin(); it != rec.trace.rend(); ++it) {
            if (it->n == n) {
                rec.power = it->power;
                break;
            }
        }
        return rec;
    };

    long prev = lo - 1;
    for (long n = lo;; n = std::min(n + kCoarseStride, hi)) {
        if (probe(n)) {
            for (long m = prev + 1; m < n; ++m) {
                if (probe(m)) return accept(m);
            }
            return accept(n);
        }
        if (n == hi) break;
        prev = n;
    }
    throw InfeasibleError("no interim sample size in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                              "] reaches minimum power " + std::to_string(Gamma1) + "; best is " +
                              std::to_string(best_power) + " at n = " + std::to_string(best_n),
                          best_power, best_n);
}

std::uint64_t scenario_seed(std::uint64_t base_seed, const std::string& scenario) noexcept {
    return derive_key(base_seed, {fnv1a(scenario)});
}

long default_n_b(long n_a, bool power_short) noexcept {
    const double ratio = power_short ? 5.0 / 3.0 : 3.0 / 5.0;
    return std::lround(static_cast<double>(n_a) * ratio);
}

Algorithm1Result run_anchor_stage(const Algorithm1Inputs& in, const std::function<void(const std::string&)>& on_stage) {
    auto stage = [&](const std::string& s) {
        if (on_stage) on_stage(s);
    };
    in.thresholds.validate();
    const TrialDesign design_a = in.design.at_interim(in.n_a);
    auto batch = [&](const TrialDesign& d, const ScenarioModel& sc) {
        const std::uint64_t seed = point_seed(scenario_seed(in.seed, sc.label), d.n_interim);
        if (in.batch) return in.batch(d, sc, seed);
        return run_batch(d, sc, in.priors, in.replicates, seed, in.parallelism, in.method);
    };

    Algorithm1Result res;
    res.thresholds = in.thresholds;

    stage("simulate " + in.null_scenario.label + " at n_a = " + std::to_string(in.n_a));
    res.null_a = batch(design_a, in.null_scenario);
    if (in.calibrate) {
        stage("calibrate kappa1");
        res.thresholds.kappa1 = calibrate_kappa1(res.null_a, in.thresholds, in.Gamma0, in.criterion);
    }

    stage("simulate " + in.alt_scenario.label + " at n_a = " + std::to_string(in.n_a));
    res.alt_a = batch(design_a, in.alt_scenario);
    const double power_a = evaluate(res.alt_a, res.thresholds).min_power();
    const long n_b = in.n_b.value_or(default_n_b(in.n_a, power_a < in.Gamma1));

    stage("simulate " + in.alt_scenario.label + " at n_b = " + std::to_string(n_b));
    res.alt_b = batch(in.design.at_interim(n_b), in.alt_scenario);

    stage("fit anchor models");
    res.models = fit_anchor_models(res.alt_a, res.alt_b);
    return res;
}

Algorithm1Result run_algorithm1(const Algorithm1Inputs& in, const std::function<void(const std::string&)>& on_stage) {
    Algorithm1Result res = run_anchor_stage(in, on_stage);
    if (on_stage) on_stage("search n");
    res.recommendation = recommend_n(res.models, res.thresholds, in.Gamma1, in.search_lo, in.search_hi);
    return res;
}

}  // namespace platdesign
