#include "platdesign/trial_sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <thread>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

constexpr std::uint64_t kTauStreamOffset = 1000;

std::array<TauSlot, kTauLength> build_layout() {
    std::array<TauSlot, kTauLength> out{};
    std::size_t i = 0;
    for (int arm = 1; arm <= 2; ++arm) {
        for (int k = 0; k < 3; ++k) out[i++] = TauSlot{true, ActiveSet(), arm, k};
    }
    for (const ActiveSet s : kAllActiveSets) {
        for (int arm = 1; arm <= 3; ++arm) {
            if (!s.contains(arm)) continue;
            for (int k = 0; k < 3; ++k) out[i++] = TauSlot{false, s, arm, k};
        }
    }
    return out;
}

// Posterior mixtures and tail probabilities reused within one replicate.
class ReplicateCache {
   public:
    ReplicateCache(const PriorRegistry& priors, const ReplicateData& data) : priors_(priors), data_(data) {}

    const PreparedMixture& posterior(int arm, int outcome, long m) {
        for (auto& e : posteriors_) {
            if (e.arm == arm && e.outcome == outcome && e.m == m) return *e.prepared;
        }
        const auto post = update_mixture(priors_.at(arm, outcome), data_.events(arm, outcome, m), m);
        posteriors_.push_back({arm, outcome, m, post, std::make_unique<PreparedMixture>(post)});
        return *posteriors_.back().prepared;
    }

    const MixtureDistribution& raw_posterior(int arm, int outcome, long m) {
        posterior(arm, outcome, m);
        for (auto& e : posteriors_) {
            if (e.arm == arm && e.outcome == outcome && e.m == m) return e.mixture;
        }
        throw std::logic_error("posterior cache miss");
    }

    std::optional<double> find_tail(int arm, int outcome, long m_arm, long m_ctrl) const {
        for (const auto& t : tails_) {
            if (t.arm == arm && t.outcome == outcome && t.m_arm == m_arm && t.m_ctrl == m_ctrl) return t.value;
        }
        return std::nullopt;
    }
    void store_tail(int arm, int outcome, long m_arm, long m_ctrl, double v) {
        tails_.push_back({arm, outcome, m_arm, m_ctrl, v});
    }

   private:
    struct PosteriorEntry {
        int arm;
        int outcome;
        long m;
        MixtureDistribution mixture;
        std::unique_ptr<PreparedMixture> prepared;
    };
    struct TailEntry {
        int arm;
        int outcome;
        long m_arm;
        long m_ctrl;
        double value;
    };
    const PriorRegistry& priors_;
    const ReplicateData& data_;
    std::vector<PosteriorEntry> posteriors_;
    std::vector<TailEntry> tails_;
};

}  // namespace

std::string to_string(Hypothesis h) { return h == Hypothesis::null ? "null" : "alternative"; }

Hypothesis hypothesis_from_string(const std::string& s) {
    if (s == "null") return Hypothesis::null;
    if (s == "alternative") return Hypothesis::alternative;
    throw ConfigError("hypothesis must be 'null' or 'alternative', got '" + s + "'");
}

const std::map<std::string, RateProfile>& standard_profiles() {
    static const std::map<std::string, RateProfile> profiles = {
        {"reference", {0.02, 0.75, 0.25}},
        {"clearly_acceptable", {0.02, 0.75, 0.25}},
        {"acceptable", {0.03, 0.72, 0.28}},
        {"barely_acceptable", {0.05, 0.70, 0.30}},
        {"unacceptable", {0.06, 0.65, 0.35}},
    };
    return profiles;
}

void ScenarioModel::validate() const {
    for (const auto& row : theta) {
        for (double t : row) {
            if (!(t > 0.0 && t < 1.0)) throw ConfigError("scenario '" + label + "': event probabilities must lie in (0, 1)");
        }
    }
}

ScenarioModel ScenarioModel::from_profiles(std::string label, const std::array<RateProfile, 4>& arms,
                                           Hypothesis hypothesis) {
    ScenarioModel s;
    s.label = std::move(label);
    s.hypothesis = hypothesis;
    for (std::size_t j = 0; j < 4; ++j) {
        s.theta[j] = {arms[j].ae, 1.0 - arms[j].completion, arms[j].non_tolerability};
    }
    s.validate();
    return s;
}

ScenarioModel ScenarioModel::from_profile_names(std::string label, const std::array<std::string, 3>& experimental,
                                                Hypothesis hypothesis, const std::string& reference) {
    const auto& p = standard_profiles();
    auto get = [&](const std::string& name) {
        auto it = p.find(name);
        if (it == p.end()) throw ConfigError("unknown rate profile '" + name + "'");
        return it->second;
    };
    return from_profiles(std::move(label),
                         {get(reference), get(experimental[0]), get(experimental[1]), get(experimental[2])}, hypothesis);
}

std::string TauSlot::name() const {
    static const char* outcomes[] = {"ae", "noncompletion", "nontolerability"};
    if (interim) return "interim.arm" + std::to_string(arm) + "." + outcomes[outcome];
    return "final" + set.to_string() + ".arm" + std::to_string(arm) + "." + outcomes[outcome];
}

const std::array<TauSlot, kTauLength>& tau_layout() {
    static const auto layout = build_layout();
    return layout;
}

int interim_index(int arm, int outcome) {
    if (arm < 1 || arm > 2 || outcome < 0 || outcome > 2) throw DomainError("interim_index: arm must be 1 or 2");
    return (arm - 1) * 3 + outcome;
}

int final_index(ActiveSet s, int arm, int outcome) {
    static constexpr std::array<int, 4> base = {6, 9, 15, 21};
    if (!s.contains(arm) || arm < 1 || arm > 3 || outcome < 0 || outcome > 2) {
        throw DomainError("final_index: arm " + std::to_string(arm) + " is not final-tested under " + s.to_string());
    }
    int pos = 0;
    for (int a = 1; a < arm; ++a) pos += s.contains(a) ? 1 : 0;
    return base[static_cast<std::size_t>(s.index())] + pos * 3 + outcome;
}

std::uint64_t replicate_key(std::uint64_t seed, std::uint64_t r) noexcept { return derive_key(seed, {r}); }

std::uint64_t point_seed(std::uint64_t base_seed, long n) noexcept {
    return derive_key(base_seed, {0x5eedULL, static_cast<std::uint64_t>(n)});
}

ReplicateData simulate_data(const TrialDesign& design, const ScenarioModel& scenario, std::uint64_t key) {
    const ArmCounts s1 = stage1_counts(design);
    std::array<long, 4> longest{};
    for (std::size_t j = 0; j < 4; ++j) longest[j] = s1.n[j];
    for (const ActiveSet s : kAllActiveSets) {
        const ArmCounts f = final_counts(design, s);
        for (std::size_t j = 0; j < 4; ++j) longest[j] = std::max(longest[j], f.n[j]);
    }

    ReplicateData data;
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
            CounterStream stream(derive_key(key, {j, k}));
            const double theta = scenario.theta[j][k];
            auto& cum = data.cumulative[j][k];
            cum.resize(static_cast<std::size_t>(longest[j]) + 1);
            cum[0] = 0;
            for (std::size_t m = 1; m < cum.size(); ++m) cum[m] = cum[m - 1] + (stream.uniform() < theta ? 1 : 0);
        }
    }
    return data;
}

TauVector compute_tau(const TrialDesign& design, const PriorRegistry& priors, const ReplicateData& data,
                      const TauMethod& method, std::uint64_t key) {
    const ArmCounts s1 = stage1_counts(design);
    std::array<ArmCounts, 4> fc;
    for (const ActiveSet s : kAllActiveSets) fc[static_cast<std::size_t>(s.index())] = final_counts(design, s);

    const bool quad = method.kind == TauMethod::Kind::quadrature;
    const QuadratureRule* rule = quad ? &gauss_legendre(method.quadrature_order) : nullptr;
    ReplicateCache cache(priors, data);

    auto tail = [&](int slot, int arm, int k, long m_arm, long m_ctrl) {
        const double delta = design.margins[static_cast<std::size_t>(k)];
        if (quad) {
            if (auto hit = cache.find_tail(arm, k, m_arm, m_ctrl)) return *hit;
            const double v = prob_diff_ge(cache.posterior(arm, k, m_arm), cache.posterior(kControlArm, k, m_ctrl),
                                          delta, *rule);
            cache.store_tail(arm, k, m_arm, m_ctrl, v);
            return v;
        }
        CounterStream stream(derive_key(key, {kTauStreamOffset + static_cast<std::uint64_t>(slot)}));
        return prob_diff_ge_mc(cache.raw_posterior(arm, k, m_arm), cache.raw_posterior(kControlArm, k, m_ctrl), delta,
                               method.draws, stream);
    };

    TauVector tau;
    const auto& layout = tau_layout();
    for (int i = 0; i < kTauLength; ++i) {
        const TauSlot& slot = layout[static_cast<std::size_t>(i)];
        if (slot.interim) {
            tau.values[static_cast<std::size_t>(i)] = tail(i, slot.arm, slot.outcome, s1[slot.arm], s1[kControlArm]);
        } else {
            const ArmCounts& f = fc[static_cast<std::size_t>(slot.set.index())];
            tau.values[static_cast<std::size_t>(i)] = 1.0 - tail(i, slot.arm, slot.outcome, f[slot.arm], f[kControlArm]);
        }
    }
    return tau;
}

TauVector simulate_replicate(const TrialDesign& design, const ScenarioModel& scenario, const PriorRegistry& priors,
                             const TauMethod& method, std::uint64_t key) {
    scenario.validate();
    const ReplicateData data = simulate_data(design, scenario, key);
    return compute_tau(design, priors, data, method, key);
}

TauSampleSet run_batch(const TrialDesign& design, const ScenarioModel& scenario, const PriorRegistry& priors,
                       std::size_t replicates, std::uint64_t seed, unsigned parallelism, const TauMethod& method) {
    if (replicates == 0) throw DomainError("run_batch: at least one replicate is required");
    design.validate();
    scenario.validate();
    if (method.kind == TauMethod::Kind::monte_carlo && method.draws == 0) {
        throw DomainError("run_batch: Monte Carlo draw count must be positive");
    }

    TauSampleSet out;
    out.n_interim = design.n_interim;
    out.c2 = design.c2;
    out.scenario = scenario.label;
    out.hypothesis = scenario.hypothesis;
    out.seed = seed;
    out.method = method;
    out.replicates.resize(replicates);

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t r = begin; r < replicates; r += stride) {
            TauVector t = simulate_replicate(design, scenario, priors, method, replicate_key(seed, r));
            t.replicate = r;
            out.replicates[r] = t;
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(replicates)));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    return out;
}

}  // namespace platdesign
