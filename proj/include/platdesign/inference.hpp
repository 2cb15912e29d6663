#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "platdesign/detail/beta_kernel.hpp"
#include "platdesign/priors.hpp"
#include "platdesign/stats.hpp"

namespace platdesign {

/// How posterior tail probabilities are evaluated.
struct TauMethod {
    enum class Kind { quadrature, monte_carlo };
    Kind kind = Kind::quadrature;
    int quadrature_order = kDefaultQuadratureOrder;
    std::uint64_t draws = 1000;  // Monte Carlo only

    static TauMethod quadrature(int order = kDefaultQuadratureOrder) { return {Kind::quadrature, order, 0}; }
    static TauMethod monte_carlo(std::uint64_t m) { return {Kind::monte_carlo, kDefaultQuadratureOrder, m}; }

    /// Logit clamping epsilon matched to the method's resolution.
    double logit_eps() const noexcept {
        return logit_eps_for_draws(kind == Kind::monte_carlo ? draws : 0);
    }
    std::string describe() const;
    friend bool operator==(const TauMethod&, const TauMethod&) = default;
};

/// A mixture with per-component normalizers and supports cached for
/// repeated quadrature.
class PreparedMixture {
   public:
    explicit PreparedMixture(const MixtureDistribution& m);

    struct Entry {
        double weight;
        detail::BetaKernel kernel;
    };
    const std::vector<Entry>& entries() const noexcept { return entries_; }

   private:
    std::vector<Entry> entries_;
};

/// P(theta_j - theta_0 >= delta) for independent theta_j ~ post_j and
/// theta_0 ~ post_0, by component-pairwise Gauss–Legendre quadrature.
double prob_diff_ge(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                    int quadrature_order = kDefaultQuadratureOrder);
double prob_diff_ge(const PreparedMixture& post_j, const PreparedMixture& post_0, double delta,
                    const QuadratureRule& rule);

/// Monte Carlo estimate from `draws` paired draws taken from `stream`.
double prob_diff_ge_mc(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                       std::uint64_t draws, RandomStream& stream);

/// P(theta_j - theta_0 < delta) = 1 - prob_diff_ge(...).
double prob_noninferior(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                        int quadrature_order = kDefaultQuadratureOrder);
double prob_noninferior_mc(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                           std::uint64_t draws, RandomStream& stream);

/// One draw from a mixture: pick a component by weight, then a Beta draw.
double mixture_sample(const MixtureDistribution& m, RandomStream& stream);

}  // namespace platdesign
