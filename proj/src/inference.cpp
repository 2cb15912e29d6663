#include "platdesign/inference.hpp"

#include <algorithm>
#include <cmath>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

// Components this light cannot move a probability by more than ~1e-16.
constexpr double kNegligibleWeight = 1e-17;
constexpr double kSharedGridSpread = 4.0;

void check_delta(double delta) {
    if (!(delta >= -1.0 && delta <= 1.0)) throw DomainError("delta must lie in [-1, 1]");
}

// P(X - Y >= delta) for X ~ fx, Y ~ fy single Beta components.
double pair_tail(const detail::BetaKernel& fx, const detail::BetaKernel& fy, double delta,
                 const QuadratureRule& rule) noexcept {
    // F_y(x - delta) is 0 below lo_y + delta and 1 above hi_y + delta, so only
    // the overlap of the two effective supports needs quadrature.
    const double lower = std::max(fx.lo, fy.lo + delta);
    const double upper = std::min(fx.hi, fy.hi + delta);

    const double step_end = fy.hi + delta;
    double tail = 0.0;
    if (step_end <= fx.lo) {
        tail = 1.0;
    } else if (step_end < fx.hi) {
        tail = 1.0 - fx.cdf(step_end);
    }

    double integral = 0.0;
    if (lower < upper) {
        const double width = upper - lower;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = lower + width * rule.nodes[i];
            const double f = fx.pdf(x);
            if (f == 0.0) continue;
            integral += rule.weights[i] * f * fy.cdf(x - delta);
        }
        integral *= width;
    }
    return integral + tail;
}

struct Hull {
    double lo;
    double hi;
};

Hull hull_of(const std::vector<PreparedMixture::Entry>& e) {
    Hull h{1.0, 0.0};
    for (const auto& x : e) {
        h.lo = std::min(h.lo, x.kernel.lo);
        h.hi = std::max(h.hi, x.kernel.hi);
    }
    return h;
}

// A shared grid is accurate only when no component is much narrower than
// the hull of all of them.
bool shares_grid(const std::vector<PreparedMixture::Entry>& e) {
    if (e.size() <= 1) return true;
    const Hull h = hull_of(e);
    double narrowest = 1.0;
    for (const auto& x : e) narrowest = std::min(narrowest, x.kernel.hi - x.kernel.lo);
    return h.hi - h.lo <= kSharedGridSpread * narrowest;
}

double mixture_pdf(const std::vector<PreparedMixture::Entry>& e, double x) noexcept {
    double s = 0.0;
    for (const auto& c : e) s += c.weight * c.kernel.pdf(x);
    return s;
}

double mixture_cdf_prepared(const std::vector<PreparedMixture::Entry>& e, double x) noexcept {
    double s = 0.0;
    for (const auto& c : e) s += c.weight * c.kernel.cdf(x);
    return s;
}

// P = mass of g_j above hi_0 + delta + int g_j(x) G_0(x - delta) dx.
double shared_tail_over_experimental(const std::vector<PreparedMixture::Entry>& ej,
                                     const std::vector<PreparedMixture::Entry>& e0, double delta,
                                     const QuadratureRule& rule) noexcept {
    const Hull hj = hull_of(ej);
    const Hull h0 = hull_of(e0);
    const double step_end = h0.hi + delta;
    double tail = 0.0;
    if (step_end <= hj.lo) {
        tail = 1.0;
    } else if (step_end < hj.hi) {
        tail = 1.0 - mixture_cdf_prepared(ej, step_end);
    }
    const double lower = std::max(hj.lo, h0.lo + delta);
    const double upper = std::min(hj.hi, step_end);
    double integral = 0.0;
    if (lower < upper) {
        const double width = upper - lower;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double x = lower + width * rule.nodes[i];
            const double f = mixture_pdf(ej, x);
            if (f == 0.0) continue;
            integral += rule.weights[i] * f * mixture_cdf_prepared(e0, x - delta);
        }
        integral *= width;
    }
    return integral + tail;
}

// P(theta_0 <= theta_j - delta) = G_0(lo_j - delta) + int g_0(y) (1 - G_j(y + delta)) dy.
double shared_tail_over_control(const std::vector<PreparedMixture::Entry>& ej,
                                const std::vector<PreparedMixture::Entry>& e0, double delta,
                                const QuadratureRule& rule) noexcept {
    const Hull hj = hull_of(ej);
    const Hull h0 = hull_of(e0);
    const double step_start = hj.lo - delta;
    double head = 0.0;
    if (step_start >= h0.hi) {
        head = 1.0;
    } else if (step_start > h0.lo) {
        head = mixture_cdf_prepared(e0, step_start);
    }
    const double lower = std::max(h0.lo, step_start);
    const double upper = std::min(h0.hi, hj.hi - delta);
    double integral = 0.0;
    if (lower < upper) {
        const double width = upper - lower;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double y = lower + width * rule.nodes[i];
            const double f = mixture_pdf(e0, y);
            if (f == 0.0) continue;
            integral += rule.weights[i] * f * (1.0 - mixture_cdf_prepared(ej, y + delta));
        }
        integral *= width;
    }
    return head + integral;
}

}  // namespace

std::string TauMethod::describe() const {
    if (kind == Kind::quadrature) return "quadrature(" + std::to_string(quadrature_order) + ")";
    return "monte_carlo(" + std::to_string(draws) + ")";
}

PreparedMixture::PreparedMixture(const MixtureDistribution& m) {
    entries_.reserve(m.size());
    for (const auto& c : m.components()) {
        if (c.weight > kNegligibleWeight) entries_.push_back({c.weight, detail::BetaKernel(c.params)});
    }
}

double prob_diff_ge(const PreparedMixture& post_j, const PreparedMixture& post_0, double delta,
                    const QuadratureRule& rule) {
    check_delta(delta);
    if (delta == 1.0) return 0.0;
    if (delta == -1.0) return 1.0;

    const auto& ej = post_j.entries();
    const auto& e0 = post_0.entries();
    // Integrate over the side with more components on one shared grid so each
    // node needs only the other side's (fewer, costlier) CDF evaluations.
    double total = 0.0;
    if (ej.size() >= e0.size() && shares_grid(ej)) {
        total = shared_tail_over_experimental(ej, e0, delta, rule);
    } else if (e0.size() > ej.size() && shares_grid(e0)) {
        total = shared_tail_over_control(ej, e0, delta, rule);
    } else {
        for (const auto& a : ej) {
            for (const auto& b : e0) total += a.weight * b.weight * pair_tail(a.kernel, b.kernel, delta, rule);
        }
    }
    return std::clamp(total, 0.0, 1.0);
}

double prob_diff_ge(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                    int quadrature_order) {
    check_delta(delta);
    return prob_diff_ge(PreparedMixture(post_j), PreparedMixture(post_0), delta, gauss_legendre(quadrature_order));
}

double mixture_sample(const MixtureDistribution& m, RandomStream& stream) {
    const auto& comps = m.components();
    std::size_t pick = comps.size() - 1;
    if (comps.size() > 1) {
        const double u = stream.uniform();
        double acc = 0.0;
        for (std::size_t c = 0; c < comps.size(); ++c) {
            acc += comps[c].weight;
            if (u < acc) {
                pick = c;
                break;
            }
        }
    }
    return beta_sample(comps[pick].params, stream);
}

double prob_diff_ge_mc(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                       std::uint64_t draws, RandomStream& stream) {
    check_delta(delta);
    if (draws == 0) throw DomainError("Monte Carlo draw count must be positive");
    std::uint64_t hits = 0;
    for (std::uint64_t m = 0; m < draws; ++m) {
        const double tj = mixture_sample(post_j, stream);
        const double t0 = mixture_sample(post_0, stream);
        if (tj - t0 >= delta) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(draws);
}

double prob_noninferior(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                        int quadrature_order) {
    return 1.0 - prob_diff_ge(post_j, post_0, delta, quadrature_order);
}

double prob_noninferior_mc(const MixtureDistribution& post_j, const MixtureDistribution& post_0, double delta,
                           std::uint64_t draws, RandomStream& stream) {
    return 1.0 - prob_diff_ge_mc(post_j, post_0, delta, draws, stream);
}

}  // namespace platdesign
