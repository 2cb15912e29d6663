#include "platdesign/priors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "platdesign/errors.hpp"

namespace platdesign {

MixtureDistribution::MixtureDistribution(const BetaParams& p, std::string label)
    : components_{MixtureComponent{1.0, BetaParams(p.alpha, p.beta), std::move(label)}} {}

MixtureDistribution::MixtureDistribution(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("mixture must have at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0 && c.weight <= 1.0)) throw ConfigError("mixture weight outside [0, 1]");
        BetaParams check(c.params.alpha, c.params.beta);
        (void)check;
        total += c.weight;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("mixture weights must sum to 1");
}

double MixtureDistribution::mean() const noexcept {
    double m = 0.0;
    for (const auto& c : components_) m += c.weight * c.params.mean();
    return m;
}

void HistoricalTable::validate() const {
    std::vector<std::string> errs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string at = "historical[" + std::to_string(i) + "]";
        if (r.total <= 0) errs.push_back(at + ".total_count must be positive");
        if (r.events < 0 || r.events > r.total) errs.push_back(at + ".events_count must lie in [0, total_count]");
        if (!(r.alpha > 0.0) || !std::isfinite(r.alpha)) errs.push_back(at + ".alpha must be positive");
        if (!(r.beta > 0.0) || !std::isfinite(r.beta)) errs.push_back(at + ".beta must be positive");
        if (r.regimen.empty()) errs.push_back(at + ".regimen must be non-empty");
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
}

HistoricalTable HistoricalTable::sstarlet() {
    return HistoricalTable{{
        {"ruslami2024", "2R20", 8, 441, 9.0, 434.0},
        {"ruslami2024", "4R10", 15, 440, 16.0, 426.0},
        {"menzies2018", "4R10", 15, 422, 16.0, 408.0},
        {"menzies2008", "4R10", 15, 393, 16.0, 379.0},
        {"menzies2004", "4R10", 2, 58, 3.0, 57.0},
    }};
}

MixtureDistribution build_map_prior(const HistoricalTable& table, const std::string& regimen, double w1,
                                    const BetaParams& vague, const std::vector<double>& relative_weights) {
    if (!(w1 >= 0.0 && w1 <= 1.0)) throw ConfigError("w1 must lie in [0, 1]");
    table.validate();
    std::vector<const HistoricalRow*> rows;
    for (const auto& r : table.rows) {
        if (r.regimen == regimen) rows.push_back(&r);
    }
    if (rows.empty()) throw ConfigError("no historical rows for regimen '" + regimen + "'");

    std::vector<double> wh(rows.size(), 1.0 / static_cast<double>(rows.size()));
    if (!relative_weights.empty()) {
        if (relative_weights.size() != rows.size()) {
            throw ConfigError("relative weights for '" + regimen + "' must match its row count");
        }
        const double s = std::accumulate(relative_weights.begin(), relative_weights.end(), 0.0);
        if (!(s > 0.0)) throw ConfigError("relative weights must have a positive sum");
        for (std::size_t h = 0; h < wh.size(); ++h) {
            if (relative_weights[h] < 0.0) throw ConfigError("relative weights must be non-negative");
            wh[h] = relative_weights[h] / s;
        }
    }

    std::vector<MixtureComponent> comps;
    if (w1 > 0.0) {
        for (std::size_t h = 0; h < rows.size(); ++h) {
            if (wh[h] > 0.0) {
                comps.push_back({w1 * wh[h], BetaParams(rows[h]->alpha, rows[h]->beta), rows[h]->study});
            }
        }
    }
    if (w1 < 1.0) comps.push_back({1.0 - w1, BetaParams(vague.alpha, vague.beta), "vague"});
    return MixtureDistribution(std::move(comps));
}

double log_marginal_likelihood(const BetaParams& p, long y, long n) {
    if (y < 0 || n < 0 || y > n) throw DomainError("log_marginal_likelihood: need 0 <= y <= n");
    if (n == 0) return 0.0;
    const auto yd = static_cast<double>(y);
    const auto fd = static_cast<double>(n - y);
    return log_beta_fn(p.alpha + yd, p.beta + fd) - log_beta_fn(p.alpha, p.beta);
}

MixtureDistribution update_mixture(const MixtureDistribution& prior, long y, long n) {
    if (y < 0 || n < 0 || y > n) throw DomainError("update_mixture: need 0 <= y <= n");
    const auto& in = prior.components();
    const auto yd = static_cast<double>(y);
    const auto fd = static_cast<double>(n - y);

    if (in.size() == 1) {
        return MixtureDistribution(
            {MixtureComponent{1.0, BetaParams(in[0].params.alpha + yd, in[0].params.beta + fd), in[0].label}});
    }

    std::vector<double> logw(in.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < in.size(); ++c) {
        logw[c] = in[c].weight > 0.0 ? std::log(in[c].weight) + log_marginal_likelihood(in[c].params, y, n)
                                     : -std::numeric_limits<double>::infinity();
        top = std::max(top, logw[c]);
    }
    double z = 0.0;
    for (double& lw : logw) {
        lw = std::exp(lw - top);
        z += lw;
    }
    std::vector<MixtureComponent> out;
    out.reserve(in.size());
    for (std::size_t c = 0; c < in.size(); ++c) {
        const double w = logw[c] / z;
        out.push_back({w, BetaParams(in[c].params.alpha + yd, in[c].params.beta + fd), in[c].label});
    }
    return MixtureDistribution(std::move(out));
}

double mixture_cdf(const MixtureDistribution& m, double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("mixture_cdf: x must lie in [0, 1]");
    double s = 0.0;
    for (const auto& c : m.components()) s += c.weight * beta_cdf(x, c.params);
    return std::min(1.0, s);
}

PriorRegistry::PriorRegistry()
    : cells_(kNumArms * kNumOutcomes, MixtureDistribution(BetaParams{1.0, 1.0})) {}

std::size_t PriorRegistry::index(int arm, int outcome) {
    if (arm < 0 || arm >= kNumArms || outcome < 0 || outcome >= kNumOutcomes) {
        throw ConfigError("prior registry index out of range");
    }
    return static_cast<std::size_t>(arm * kNumOutcomes + outcome);
}

const MixtureDistribution& PriorRegistry::at(int arm, int outcome) const { return cells_[index(arm, outcome)]; }

void PriorRegistry::set(int arm, int outcome, MixtureDistribution prior) {
    cells_[index(arm, outcome)] = std::move(prior);
}

PriorRegistry PriorRegistry::sstarlet(const HistoricalTable& table, double w1, const BetaParams& vague,
                                      const std::string& control_regimen, const std::string& arm1_regimen) {
    PriorRegistry reg;
    reg.set(0, 0, build_map_prior(table, control_regimen, w1, vague));
    reg.set(1, 0, build_map_prior(table, arm1_regimen, w1, vague));
    return reg;
}

}  // namespace platdesign
