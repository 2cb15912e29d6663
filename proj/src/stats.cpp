#include "platdesign/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "platdesign/detail/beta_kernel.hpp"
#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;

// lgamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)] for x >= 10 (Stirling series).
double stirling_correction(double x) noexcept {
    const double r = 1.0 / (x * x);
    const double s =
        1.0 / 12.0 -
        r * (1.0 / 360.0 -
             r * (1.0 / 1260.0 -
                  r * (1.0 / 1680.0 -
                       r * (1.0 / 1188.0 - r * (691.0 / 360360.0 - r * (1.0 / 156.0 - r * (3617.0 / 122400.0)))))));
    return s / x;
}

void require_shape(double a, double b, const char* what) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError(std::string(what) + ": shape parameters must be positive and finite");
    }
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) noexcept {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

double log_density_kernel(double x, double a, double b) noexcept {
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
}

// Root of g(x) = target on [left, right] where g is the (concave) Beta
// log-density kernel, monotone on the bracket. Safeguarded Newton.
double solve_log_density(double a, double b, double target, double left, double right) noexcept {
    const bool increasing = log_density_kernel(right, a, b) > log_density_kernel(left, a, b);
    double x = 0.5 * (left + right);
    for (int it = 0; it < 200; ++it) {
        const double gx = log_density_kernel(x, a, b) - target;
        if ((gx < 0.0) == increasing) {
            left = x;
        } else {
            right = x;
        }
        const double dg = (a - 1.0) / x - (b - 1.0) / (1.0 - x);
        double next = x - gx / dg;
        if (!(next > left && next < right) || dg == 0.0) next = 0.5 * (left + right);
        if (std::fabs(next - x) <= 1e-15 * std::max(1e-300, std::fabs(x)) || right - left < 1e-300) {
            return next;
        }
        x = next;
    }
    return x;
}

}  // namespace

BetaParams::BetaParams(double a, double b) : alpha(a), beta(b) { require_shape(a, b, "BetaParams"); }

double log_beta_fn(double a, double b) {
    require_shape(a, b, "log_beta_fn");
    const double p = std::min(a, b);
    const double q = std::max(a, b);
    if (p >= 10.0) {
        const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
        return -0.5 * std::log(q) + kLnSqrt2Pi + corr + (p - 0.5) * std::log(p / (p + q)) +
               q * std::log1p(-p / (p + q));
    }
    if (q >= 10.0) {
        const double corr = stirling_correction(q) - stirling_correction(p + q);
        return std::lgamma(p) + corr + p - p * std::log(p + q) + (q - 0.5) * std::log1p(-p / (p + q));
    }
    return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

namespace detail {

double beta_cdf_prepared(double x, double a, double b, double lbeta) noexcept {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

BetaKernel::BetaKernel(const BetaParams& p) : a(p.alpha), b(p.beta), lbeta(log_beta_fn(p.alpha, p.beta)) {
    if (a > 1.0 && b > 1.0) {
        const double mode = (a - 1.0) / (a + b - 2.0);
        const double target = log_density_kernel(mode, a, b) - kSupportLogDrop;
        lo = solve_log_density(a, b, target, std::numeric_limits<double>::min(), mode);
        hi = solve_log_density(a, b, target, mode, 1.0 - 0x1.0p-53);
    } else if (a == 1.0 && b > 1.0) {
        hi = -std::expm1(-kSupportLogDrop / (b - 1.0));
    } else if (b == 1.0 && a > 1.0) {
        lo = std::exp(-kSupportLogDrop / (a - 1.0));
    }
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, lo, 1.0);
}

double BetaKernel::pdf(double x) const noexcept {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(log_density_kernel(x, a, b) - lbeta);
}

double BetaKernel::cdf(double x) const noexcept { return beta_cdf_prepared(x, a, b, lbeta); }

}  // namespace detail

double beta_cdf(double x, const BetaParams& p) {
    require_shape(p.alpha, p.beta, "beta_cdf");
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("beta_cdf: x must lie in [0, 1]");
    return detail::beta_cdf_prepared(x, p.alpha, p.beta, log_beta_fn(p.alpha, p.beta));
}

double beta_pdf(double x, const BetaParams& p) {
    require_shape(p.alpha, p.beta, "beta_pdf");
    if (!(x > 0.0 && x < 1.0)) return 0.0;
    return std::exp(log_density_kernel(x, p.alpha, p.beta) - log_beta_fn(p.alpha, p.beta));
}

double beta_sample(const BetaParams& p, RandomStream& stream) {
    std::gamma_distribution<double> ga(p.alpha, 1.0);
    std::gamma_distribution<double> gb(p.beta, 1.0);
    const double x = ga(stream);
    const double y = gb(stream);
    const double s = x + y;
    if (s <= 0.0) return p.mean();  // both gammas underflowed; only for tiny shapes
    return x / s;
}

double logit_eps_for_draws(std::uint64_t draws) noexcept {
    if (draws == 0) return kDefaultLogitEps;
    return std::max(kDefaultLogitEps, 1.0 / (4.0 * static_cast<double>(draws)));
}

double logit_clamped(double x, double eps) {
    if (std::isnan(x)) throw DomainError("logit_clamped: NaN probability");
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("logit_clamped: eps must lie in (0, 0.5)");
    const double c = std::clamp(x, eps, 1.0 - eps);
    return std::log(c) - std::log1p(-c);
}

double inv_logit(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

QuadratureRule build_gauss_legendre(int order) {
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        long double z = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (order + 0.5L));
        long double dp = 0.0L;
        for (int it = 0; it < 100; ++it) {
            long double p1 = 1.0L;
            long double p2 = 0.0L;
            for (int j = 1; j <= order; ++j) {
                const long double p3 = p2;
                p2 = p1;
                p1 = ((2.0L * j - 1.0L) * z * p2 - (j - 1.0L) * p3) / j;
            }
            dp = order * (z * p1 - p2) / (z * z - 1.0L);
            const long double step = p1 / dp;
            z -= step;
            if (std::fabs(step) < 1e-19L) break;
        }
        const long double w = 2.0L / ((1.0L - z * z) * dp * dp);
        // z runs from +1 towards 0; map to [0,1] ascending.
        const auto lo_idx = static_cast<std::size_t>(i);
        const auto hi_idx = static_cast<std::size_t>(order - 1 - i);
        rule.nodes[lo_idx] = static_cast<double>(0.5L * (1.0L - z));
        rule.nodes[hi_idx] = static_cast<double>(0.5L * (1.0L + z));
        rule.weights[lo_idx] = static_cast<double>(0.5L * w);
        rule.weights[hi_idx] = static_cast<double>(0.5L * w);
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
    if (order < 1) throw DomainError("gauss_legendre: order must be positive");
    static std::mutex mu;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<QuadratureRule>(build_gauss_legendre(order));
    return *slot;
}

}  // namespace platdesign
