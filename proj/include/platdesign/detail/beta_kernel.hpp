#pragma once

// Internal helpers shared by the quadrature path. Not part of the public API.

#include "platdesign/stats.hpp"

namespace platdesign::detail {

/// I_x(a, b) with ln B(a, b) supplied by the caller. No argument checks.
double beta_cdf_prepared(double x, double a, double b, double lbeta) noexcept;

/// A Beta component with cached normalizer and effective support: outside
/// [lo, hi] the log-density sits more than `kSupportLogDrop` below its mode.
struct BetaKernel {
    double a = 1.0;
    double b = 1.0;
    double lbeta = 0.0;
    double lo = 0.0;
    double hi = 1.0;

    explicit BetaKernel(const BetaParams& p);

    double pdf(double x) const noexcept;
    double cdf(double x) const noexcept;
};

inline constexpr double kSupportLogDrop = 46.0;

}  // namespace platdesign::detail
