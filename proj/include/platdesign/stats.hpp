#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <vector>

namespace platdesign {

/// Parameters of a Beta(alpha, beta) distribution; both strictly positive.
struct BetaParams {
    double alpha = 1.0;
    double beta = 1.0;

    BetaParams() = default;
    BetaParams(double a, double b);  // throws DomainError

    double mean() const noexcept { return alpha / (alpha + beta); }
    double variance() const noexcept {
        const double s = alpha + beta;
        return alpha * beta / (s * s * (s + 1.0));
    }
    friend bool operator==(const BetaParams&, const BetaParams&) = default;
};

/// ln B(a, b). Relative error below 1e-12 up to a, b = 1e6.
double log_beta_fn(double a, double b);

/// Regularized incomplete beta I_x(alpha, beta).
double beta_cdf(double x, const BetaParams& p);

/// Beta density; zero outside (0,1).
double beta_pdf(double x, const BetaParams& p);

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Folds a list of coordinates into one 64-bit stream key.
constexpr std::uint64_t derive_key(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> coords) noexcept {
    std::uint64_t k = mix64(seed);
    for (auto c : coords) k = mix64(k ^ mix64(c + 0x632be59bd9b4e019ULL));
    return k;
}

/// Counter-based generator: the i-th output is a pure function of (key, i),
/// so substreams keyed by replicate/arm/outcome are reproducible regardless
/// of scheduling. Satisfies UniformRandomBitGenerator.
class CounterStream {
   public:
    using result_type = std::uint64_t;

    explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }
    result_type operator()() noexcept { return mix64(key_ ^ mix64(counter_++)); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t position() const noexcept { return counter_; }

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

using RandomStream = CounterStream;

/// One Beta draw via the ratio of two Gamma variates.
double beta_sample(const BetaParams& p, RandomStream& stream);

// ---------------------------------------------------------------------------
// Logits
// ---------------------------------------------------------------------------

inline constexpr double kDefaultLogitEps = 1e-6;

/// Clamping epsilon for logits of probabilities estimated from M draws
/// (M == 0 means deterministic quadrature).
double logit_eps_for_draws(std::uint64_t draws) noexcept;

double logit_clamped(double x, double eps = kDefaultLogitEps);
double inv_logit(double z) noexcept;

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss–Legendre rule rescaled to [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    int order = 0;
};

inline constexpr int kDefaultQuadratureOrder = 128;

/// Builds (and caches) the order-`order` rule. Thread-safe.
const QuadratureRule& gauss_legendre(int order);

}  // namespace platdesign
