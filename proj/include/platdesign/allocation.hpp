#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace platdesign {

/// Arms: 0 control, 1 and 2 the original experimental arms, 3 the arm added
/// when the interim enrollment target is reached.
inline constexpr int kControlArm = 0;
inline constexpr int kAddedArm = 3;

/// Experimental arms {1, 2} retained after the interim analysis.
class ActiveSet {
   public:
    constexpr ActiveSet() = default;
    constexpr ActiveSet(bool arm1, bool arm2) : bits_((arm1 ? 1u : 0u) | (arm2 ? 2u : 0u)) {}

    static constexpr ActiveSet from_index(int idx) { return ActiveSet((idx & 1) != 0, (idx & 2) != 0); }
    /// Canonical order: 0 = {}, 1 = {1}, 2 = {2}, 3 = {1,2}.
    constexpr int index() const noexcept { return static_cast<int>(bits_); }

    constexpr bool contains(int arm) const noexcept {
        if (arm == kAddedArm) return true;  // the added arm always proceeds to the final analysis
        if (arm == 1) return (bits_ & 1u) != 0;
        if (arm == 2) return (bits_ & 2u) != 0;
        return false;
    }
    constexpr bool retains_experimental(int arm) const noexcept { return (arm == 1 || arm == 2) && contains(arm); }
    constexpr int retained_count() const noexcept { return static_cast<int>((bits_ & 1u) + ((bits_ >> 1) & 1u)); }
    std::string to_string() const;

    friend constexpr bool operator==(ActiveSet, ActiveSet) = default;

   private:
    unsigned bits_ = 0;
};

inline constexpr std::array<ActiveSet, 4> kAllActiveSets = {ActiveSet::from_index(0), ActiveSet::from_index(1),
                                                            ActiveSet::from_index(2), ActiveSet::from_index(3)};

struct TrialDesign {
    long n_interim = 600;
    double c2 = 2.5;
    long lag = 300;
    std::array<double, 3> stage1_ratio{1.0, 2.0, 2.0};
    double lag_new_arm_share = 0.5;
    double post_new_arm_share = 0.5;
    std::array<double, 3> margins{0.04, 0.10, 0.10};

    /// Field-level validation. Throws ConfigError listing every violation.
    void validate() const;

    /// Copy with a different interim sample size (validated).
    TrialDesign at_interim(long n) const;

    /// round(c2 * n_interim).
    long n_final() const;

    friend bool operator==(const TrialDesign&, const TrialDesign&) = default;
};

enum class Stage { stage1, lag, post_interim, final_total };

struct ArmCounts {
    std::array<long, 4> n{0, 0, 0, 0};
    Stage stage = Stage::final_total;

    long total() const noexcept { return n[0] + n[1] + n[2] + n[3]; }
    long operator[](int arm) const { return n.at(static_cast<std::size_t>(arm)); }
    friend bool operator==(const ArmCounts&, const ArmCounts&) = default;
};

/// Splits `total` in proportion to `weights` with the largest-remainder
/// method (ties go to the lower index). Exact total.
std::vector<long> apportion(long total, const std::vector<double>& weights);

ArmCounts stage1_counts(const TrialDesign& design);
ArmCounts lag_counts(const TrialDesign& design);
ArmCounts post_interim_counts(const TrialDesign& design, ActiveSet s);
ArmCounts final_counts(const TrialDesign& design, ActiveSet s);

struct LinearCount {
    double slope = 0.0;
    double intercept = 0.0;
    double at(double n) const noexcept { return slope * n + intercept; }
};

/// Real-valued per-arm final sample sizes as exact linear functions of n,
/// indexed [active set index][arm].
using LinearityCertificate = std::array<std::array<LinearCount, 4>, 4>;
LinearityCertificate linearity_certificate(const TrialDesign& design);

}  // namespace platdesign
