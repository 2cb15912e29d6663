#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "platdesign/stats.hpp"

namespace platdesign {

struct MixtureComponent {
    double weight = 1.0;
    BetaParams params;
    std::string label;

    friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

/// Weighted mixture of Beta components. Immutable once built; weights are
/// validated to sum to one (within 1e-12).
class MixtureDistribution {
   public:
    /// Single-component mixture.
    explicit MixtureDistribution(const BetaParams& p, std::string label = "vague");
    explicit MixtureDistribution(std::vector<MixtureComponent> components);

    const std::vector<MixtureComponent>& components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }
    double mean() const noexcept;

    friend bool operator==(const MixtureDistribution&, const MixtureDistribution&) = default;

   private:
    std::vector<MixtureComponent> components_;
};

struct HistoricalRow {
    std::string study;
    std::string regimen;
    long events = 0;
    long total = 0;
    double alpha = 1.0;
    double beta = 1.0;

    friend bool operator==(const HistoricalRow&, const HistoricalRow&) = default;
};

struct HistoricalTable {
    std::vector<HistoricalRow> rows;

    void validate() const;  // throws ConfigError

    /// The historical summaries bundled with the SSTARLET design (4R10, 2R20).
    static HistoricalTable sstarlet();

    friend bool operator==(const HistoricalTable&, const HistoricalTable&) = default;
};

/// Robust MAP prior: w1 spread over the regimen's historical components
/// (`relative_weights` empty means equal w_h), plus a vague component of
/// weight 1 - w1. Zero-weight components are omitted.
MixtureDistribution build_map_prior(const HistoricalTable& table, const std::string& regimen, double w1,
                                    const BetaParams& vague = BetaParams{1.0, 1.0},
                                    const std::vector<double>& relative_weights = {});

/// ln[B(a + y, b + n - y) / B(a, b)]; the binomial coefficient is omitted.
double log_marginal_likelihood(const BetaParams& p, long y, long n);

/// Conjugate update of every component plus marginal-likelihood reweighting.
MixtureDistribution update_mixture(const MixtureDistribution& prior, long y, long n);

double mixture_cdf(const MixtureDistribution& m, double x);

inline constexpr int kNumArms = 4;
inline constexpr int kNumOutcomes = 3;

/// Analysis prior for every (arm, outcome) cell.
class PriorRegistry {
   public:
    PriorRegistry();  // all Beta(1, 1)

    const MixtureDistribution& at(int arm, int outcome) const;
    void set(int arm, int outcome, MixtureDistribution prior);

    /// MAP priors on (control, AE) and (arm 1, AE); Beta(1,1) elsewhere.
    static PriorRegistry sstarlet(const HistoricalTable& table, double w1 = 0.5,
                                  const BetaParams& vague = BetaParams{1.0, 1.0},
                                  const std::string& control_regimen = "4R10",
                                  const std::string& arm1_regimen = "2R20");

   private:
    static std::size_t index(int arm, int outcome);
    std::vector<MixtureDistribution> cells_;
};

}  // namespace platdesign
