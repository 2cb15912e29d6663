#include "platdesign/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

constexpr double kTieTol = 1e-9;

struct Fractions {
    std::array<double, 4> stage1{};
    std::array<double, 4> lag{};
    std::array<double, 4> post{};
};

Fractions fractions(const TrialDesign& d, ActiveSet s) {
    Fractions f;
    const double ratio_sum = d.stage1_ratio[0] + d.stage1_ratio[1] + d.stage1_ratio[2];
    for (int j = 0; j < 3; ++j) f.stage1[static_cast<std::size_t>(j)] = d.stage1_ratio[static_cast<std::size_t>(j)] / ratio_sum;

    for (int j = 0; j < 3; ++j) f.lag[static_cast<std::size_t>(j)] = (1.0 - d.lag_new_arm_share) / 3.0;
    f.lag[3] = d.lag_new_arm_share;

    const double share = (1.0 - d.post_new_arm_share) / (1.0 + s.retained_count());
    f.post[0] = share;
    f.post[1] = s.contains(1) ? share : 0.0;
    f.post[2] = s.contains(2) ? share : 0.0;
    f.post[3] = d.post_new_arm_share;
    return f;
}

ArmCounts apportion_arms(long total, const std::array<double, 4>& w, Stage stage) {
    const auto parts = apportion(total, std::vector<double>(w.begin(), w.end()));
    ArmCounts out;
    out.stage = stage;
    for (std::size_t j = 0; j < 4; ++j) out.n[j] = parts[j];
    return out;
}

}  // namespace

std::string ActiveSet::to_string() const {
    switch (index()) {
        case 0: return "{}";
        case 1: return "{1}";
        case 2: return "{2}";
        default: return "{1,2}";
    }
}

void TrialDesign::validate() const {
    std::vector<std::string> errs;
    if (n_interim <= 0) errs.push_back("n_interim_count must be positive");
    if (!(c2 > 1.0) || !std::isfinite(c2)) errs.push_back("c2_ratio must be finite and greater than 1");
    if (lag < 0) errs.push_back("lag_count must be non-negative");
    if (n_interim > 0 && c2 > 1.0 && lag >= 0 && (c2 - 1.0) * static_cast<double>(n_interim) < static_cast<double>(lag)) {
        errs.push_back("lag constraint violated: (c2_ratio - 1) * n_interim_count must be >= lag_count");
    }
    for (double r : stage1_ratio) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            errs.push_back("stage1_ratio entries must be positive");
            break;
        }
    }
    if (!(lag_new_arm_share >= 0.0 && lag_new_arm_share <= 1.0)) errs.push_back("lag_new_arm_share_prob must lie in [0, 1]");
    if (!(post_new_arm_share >= 0.0 && post_new_arm_share <= 1.0)) errs.push_back("post_new_arm_share_prob must lie in [0, 1]");
    for (double m : margins) {
        if (!(m >= -1.0 && m <= 1.0)) {
            errs.push_back("margin_probs entries must lie in [-1, 1]");
            break;
        }
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
}

TrialDesign TrialDesign::at_interim(long n) const {
    TrialDesign d = *this;
    d.n_interim = n;
    d.validate();
    return d;
}

long TrialDesign::n_final() const { return std::lround(c2 * static_cast<double>(n_interim)); }

std::vector<long> apportion(long total, const std::vector<double>& weights) {
    if (total < 0) throw DomainError("apportion: negative total");
    const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<long> out(weights.size(), 0);
    if (total == 0 || weights.empty()) return out;
    if (!(wsum > 0.0)) throw DomainError("apportion: weights must have a positive sum");

    std::vector<double> rem(weights.size(), 0.0);
    long assigned = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double quota = static_cast<double>(total) * weights[j] / wsum;
        const double fl = std::floor(quota + kTieTol);
        out[j] = static_cast<long>(fl);
        rem[j] = quota - fl;
        assigned += out[j];
    }
    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), 0);
    // Remainders are compared at 1e-9 resolution; ties keep the lower index first.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::llround(rem[a] / kTieTol) > std::llround(rem[b] / kTieTol);
    });
    for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
        ++out[order[k]];
        ++assigned;
    }
    return out;
}

ArmCounts stage1_counts(const TrialDesign& design) {
    design.validate();
    return apportion_arms(design.n_interim, fractions(design, ActiveSet(true, true)).stage1, Stage::stage1);
}

ArmCounts lag_counts(const TrialDesign& design) {
    design.validate();
    return apportion_arms(design.lag, fractions(design, ActiveSet(true, true)).lag, Stage::lag);
}

ArmCounts post_interim_counts(const TrialDesign& design, ActiveSet s) {
    design.validate();
    const long pool = design.n_final() - design.n_interim - design.lag;
    return apportion_arms(std::max(0L, pool), fractions(design, s).post, Stage::post_interim);
}

ArmCounts final_counts(const TrialDesign& design, ActiveSet s) {
    const ArmCounts a = stage1_counts(design);
    const ArmCounts b = lag_counts(design);
    const ArmCounts c = post_interim_counts(design, s);
    ArmCounts out;
    out.stage = Stage::final_total;
    for (std::size_t j = 0; j < 4; ++j) out.n[j] = a.n[j] + b.n[j] + c.n[j];
    return out;
}

LinearityCertificate linearity_certificate(const TrialDesign& design) {
    design.validate();
    LinearityCertificate cert{};
    const double lag = static_cast<double>(design.lag);
    for (const ActiveSet s : kAllActiveSets) {
        const Fractions f = fractions(design, s);
        for (std::size_t j = 0; j < 4; ++j) {
            auto& lc = cert[static_cast<std::size_t>(s.index())][j];
            lc.slope = f.stage1[j] + f.post[j] * (design.c2 - 1.0);
            lc.intercept = f.lag[j] * lag - f.post[j] * lag;
        }
    }
    return cert;
}

}  // namespace platdesign
