#include "platdesign/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <toml.hpp>

#include "platdesign/errors.hpp"

namespace platdesign {

namespace {

// Walks one TOML table, records which keys were consumed, and collects
// field-named errors instead of throwing on the first problem.
class Reader {
   public:
    Reader(const toml::table* t, std::string prefix, std::vector<std::string>& errs)
        : t_(t), prefix_(std::move(prefix)), errs_(errs) {}

    bool present() const { return t_ != nullptr; }
    std::string field(std::string_view key) const { return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key); }
    void error(std::string_view key, const std::string& msg) { errs_.push_back(field(key) + ": " + msg); }

    const toml::node* node(std::string_view key, bool required) {
        seen_.insert(std::string(key));
        const toml::node* n = t_ ? t_->get(key) : nullptr;
        if (!n && required) error(key, "required field is missing");
        return n;
    }

    std::optional<double> real(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) return *v;
        error(key, "expected a number");
        return std::nullopt;
    }

    std::optional<long> count(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        if (n->is_integer()) return static_cast<long>(**n->as_integer());
        error(key, "expected an integer");
        return std::nullopt;
    }

    std::optional<double> prob(std::string_view key, bool required = false) {
        auto v = real(key, required);
        if (v && !(*v >= 0.0 && *v <= 1.0)) {
            error(key, "must lie in [0, 1]");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> str(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        if (n->is_string()) return std::string(**n->as_string());
        error(key, "expected a string");
        return std::nullopt;
    }

    std::optional<bool> boolean(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        if (n->is_boolean()) return **n->as_boolean();
        error(key, "expected true or false");
        return std::nullopt;
    }

    template <std::size_t N>
    std::optional<std::array<double, N>> reals(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        const toml::array* a = n->as_array();
        if (!a || a->size() != N) {
            error(key, "expected an array of " + std::to_string(N) + " numbers");
            return std::nullopt;
        }
        std::array<double, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            auto v = (*a)[i].value<double>();
            if (!v) {
                error(key, "expected an array of " + std::to_string(N) + " numbers");
                return std::nullopt;
            }
            out[i] = *v;
        }
        return out;
    }

    template <std::size_t N>
    std::optional<std::array<std::string, N>> strings(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return std::nullopt;
        const toml::array* a = n->as_array();
        if (!a || a->size() != N) {
            error(key, "expected an array of " + std::to_string(N) + " strings");
            return std::nullopt;
        }
        std::array<std::string, N> out{};
        for (std::size_t i = 0; i < N; ++i) {
            auto v = (*a)[i].value<std::string>();
            if (!v) {
                error(key, "expected an array of " + std::to_string(N) + " strings");
                return std::nullopt;
            }
            out[i] = *v;
        }
        return out;
    }

    const toml::table* table(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return nullptr;
        if (const toml::table* t = n->as_table()) return t;
        error(key, "expected a table");
        return nullptr;
    }

    const toml::array* array(std::string_view key, bool required = false) {
        const toml::node* n = node(key, required);
        if (!n) return nullptr;
        if (const toml::array* a = n->as_array()) return a;
        error(key, "expected an array of tables");
        return nullptr;
    }

    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        if (t_) {
            for (auto&& [k, v] : *t_) out.emplace_back(k.str());
        }
        return out;
    }

    /// Reports keys that were never asked for.
    void finish() {
        if (!t_) return;
        for (auto&& [k, v] : *t_) {
            if (!seen_.count(std::string(k.str()))) error(k.str(), "unknown key");
        }
    }

   private:
    const toml::table* t_;
    std::string prefix_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

void read_design(Reader& r, DesignConfig& c) {
    if (auto v = r.real("c2_ratio", true)) c.design.c2 = *v;
    if (auto v = r.count("lag_count")) c.design.lag = *v;
    if (auto v = r.reals<3>("stage1_ratio")) c.design.stage1_ratio = *v;
    if (auto v = r.prob("lag_new_arm_share_prob")) c.design.lag_new_arm_share = *v;
    if (auto v = r.prob("post_new_arm_share_prob")) c.design.post_new_arm_share = *v;
    if (auto v = r.reals<3>("margin_probs")) c.design.margins = *v;
    r.finish();
}

void read_thresholds(Reader& r, DesignConfig& c) {
    if (auto v = r.reals<3>("gamma_probs", true)) c.thresholds.gamma = *v;
    if (auto v = r.real("kappa1_prob", true)) c.thresholds.kappa1 = *v;
    if (auto v = r.reals<2>("kappa23_probs")) c.thresholds.kappa23 = *v;
    if (auto v = r.boolean("calibrate_kappa1")) c.calibrate_kappa1 = *v;
    if (auto v = r.real("fwer_target_prob")) c.Gamma0 = *v;
    if (auto v = r.prob("power_target_prob")) c.Gamma1 = *v;
    if (auto v = r.str("fwer_criterion")) {
        if (*v == "sum" || *v == "any") {
            c.criterion = fwer_criterion_from_string(*v);
        } else {
            r.error("fwer_criterion", "must be \"sum\" or \"any\"");
        }
    }
    r.finish();
}

void read_prior(Reader& r, DesignConfig& c, std::vector<std::string>& errs) {
    if (auto v = r.prob("w1_prob")) c.w1 = *v;
    auto va = r.real("vague_alpha");
    auto vb = r.real("vague_beta");
    if (va) c.vague.alpha = *va;
    if (vb) c.vague.beta = *vb;
    if (auto v = r.str("control_regimen")) c.control_regimen = *v;
    if (auto v = r.str("arm1_regimen")) c.arm1_regimen = *v;
    if (const toml::array* rows = r.array("historical", true)) {
        std::map<std::string, std::vector<std::optional<double>>> rel;
        for (std::size_t i = 0; i < rows->size(); ++i) {
            Reader row((*rows)[i].as_table(), r.field("historical") + "[" + std::to_string(i) + "]", errs);
            if (!row.present()) {
                errs.push_back(r.field("historical") + "[" + std::to_string(i) + "]: expected a table");
                continue;
            }
            HistoricalRow h;
            if (auto v = row.str("study", true)) h.study = *v;
            if (auto v = row.str("regimen", true)) h.regimen = *v;
            if (auto v = row.count("events_count", true)) h.events = *v;
            if (auto v = row.count("total_count", true)) h.total = *v;
            if (auto v = row.real("alpha", true)) h.alpha = *v;
            if (auto v = row.real("beta", true)) h.beta = *v;
            rel[h.regimen].push_back(row.real("relative_weight"));
            row.finish();
            c.historical.rows.push_back(h);
        }
        for (const auto& [regimen, ws] : rel) {
            std::size_t given = 0;
            for (const auto& w : ws) given += w ? 1 : 0;
            if (given == 0) continue;
            if (given != ws.size()) {
                errs.push_back(r.field("historical") + ".relative_weight: give it for every " + regimen +
                               " row or for none");
                continue;
            }
            std::vector<double> out;
            for (const auto& w : ws) out.push_back(*w);
            c.relative_weights[regimen] = out;
        }
    }
    r.finish();
}

void read_profiles(Reader& r, DesignConfig& c, std::vector<std::string>& errs) {
    for (const auto& name : r.keys()) {
        Reader p(r.table(name), r.field(name), errs);
        if (!p.present()) continue;
        RateProfile prof;
        if (auto v = p.prob("ae_prob", true)) prof.ae = *v;
        if (auto v = p.prob("completion_prob", true)) prof.completion = *v;
        if (auto v = p.prob("non_tolerability_prob", true)) prof.non_tolerability = *v;
        p.finish();
        c.profiles[name] = prof;
    }
    r.finish();
}

void read_scenarios(Reader& r, DesignConfig& c, std::vector<std::string>& errs) {
    for (const auto& name : r.keys()) {
        Reader sc(r.table(name), r.field(name), errs);
        if (!sc.present()) continue;
        ScenarioSpec spec;
        if (auto v = sc.strings<3>("arms", true)) spec.arms = *v;
        if (auto v = sc.str("reference")) spec.reference = *v;
        if (auto v = sc.str("hypothesis", true)) {
            if (*v == "null" || *v == "alternative") {
                spec.hypothesis = hypothesis_from_string(*v);
            } else {
                sc.error("hypothesis", "must be \"null\" or \"alternative\"");
            }
        }
        sc.finish();
        c.scenarios[name] = spec;
    }
    r.finish();
}

void read_simulation(Reader& r, DesignConfig& c) {
    if (auto v = r.count("replicates_count", true)) {
        if (*v < 1) {
            r.error("replicates_count", "must be at least 1");
        } else {
            c.replicates = static_cast<std::size_t>(*v);
        }
    }
    if (auto v = r.count("seed", true)) c.seed = static_cast<std::uint64_t>(*v);
    auto order = r.count("quadrature_order_count");
    auto draws = r.count("mc_draws_count");
    if (order && (*order < 2 || *order > 4096)) r.error("quadrature_order_count", "must lie in [2, 4096]");
    if (draws && *draws < 1) r.error("mc_draws_count", "must be at least 1");
    std::string method = r.str("method").value_or("quadrature");
    if (method == "quadrature") {
        c.method = TauMethod::quadrature(order && *order >= 2 && *order <= 4096 ? static_cast<int>(*order)
                                                                               : kDefaultQuadratureOrder);
    } else if (method == "mc") {
        c.method = TauMethod::monte_carlo(draws && *draws >= 1 ? static_cast<std::uint64_t>(*draws) : 1000);
    } else {
        r.error("method", "must be \"quadrature\" or \"mc\"");
    }
    if (auto v = r.count("parallelism_count")) {
        if (*v < 0) {
            r.error("parallelism_count", "must be non-negative (0 = all hardware threads)");
        } else {
            c.parallelism = static_cast<unsigned>(*v);
        }
    }
    r.finish();
}

void read_anchors(Reader& r, DesignConfig& c) {
    if (auto v = r.count("n_a_count", true)) c.n_a = *v;
    if (auto v = r.count("n_b_count")) c.n_b = *v;
    if (auto v = r.str("null_scenario")) c.null_scenario = *v;
    if (auto v = r.str("alt_scenario")) c.alt_scenario = *v;
    r.finish();
}

void read_search(Reader& r, DesignConfig& c) {
    if (auto v = r.count("n_min_count")) c.search_lo = *v;
    if (auto v = r.count("n_max_count")) c.search_hi = *v;
    r.finish();
}

void read_curves(Reader& r, DesignConfig& c) {
    if (auto v = r.count("n_min_count")) c.grid_lo = *v;
    if (auto v = r.count("n_max_count")) c.grid_hi = *v;
    if (auto v = r.count("n_step_count")) c.grid_step = *v;
    if (auto v = r.count("report_n_count")) c.report_n = *v;
    r.finish();
}

void check_lag(std::vector<std::string>& errs, const DesignConfig& c, const std::string& field, long n) {
    if (c.design.c2 > 1.0 && c.design.lag >= 0 && (c.design.c2 - 1.0) * static_cast<double>(n) < static_cast<double>(c.design.lag)) {
        std::ostringstream os;
        os << field << ": lag constraint violated: (c2_ratio - 1) * " << field.substr(field.rfind('.') + 1) << " = "
           << (c.design.c2 - 1.0) * static_cast<double>(n) << " is below lag_count = " << c.design.lag;
        errs.push_back(os.str());
    }
}

}  // namespace

void DesignConfig::validate() const {
    std::vector<std::string> errs;

    TrialDesign d = design;
    d.n_interim = n_a > 0 ? n_a : 1;
    d.lag = std::max(0L, design.lag);
    try {
        d.validate();
    } catch (const ConfigError& e) {
        for (const auto& f : e.fields()) {
            if (f.rfind("lag constraint", 0) == 0) continue;  // reported below against the anchor field
            errs.push_back("design." + f);
        }
    }
    if (design.lag < 0) errs.push_back("design.lag_count: must be non-negative");

    try {
        thresholds.validate();
    } catch (const ConfigError& e) {
        for (const auto& f : e.fields()) errs.push_back("thresholds." + f);
    }
    if (!(Gamma0 >= 0.0) || !std::isfinite(Gamma0)) errs.push_back("thresholds.fwer_target_prob: must be non-negative");
    if (!(Gamma1 >= 0.0 && Gamma1 <= 1.0)) errs.push_back("thresholds.power_target_prob: must lie in [0, 1]");

    if (!(w1 >= 0.0 && w1 <= 1.0)) errs.push_back("prior.w1_prob: must lie in [0, 1]");
    if (!(vague.alpha > 0.0) || !(vague.beta > 0.0)) errs.push_back("prior.vague_alpha/vague_beta: must be positive");
    try {
        historical.validate();
    } catch (const ConfigError& e) {
        for (const auto& f : e.fields()) errs.push_back("prior.historical: " + f);
    }
    for (const auto& regimen : {control_regimen, arm1_regimen}) {
        std::size_t rows = 0;
        for (const auto& h : historical.rows) rows += h.regimen == regimen ? 1 : 0;
        if (rows == 0 && w1 > 0.0) errs.push_back("prior.historical: no rows for regimen '" + regimen + "'");
    }
    for (const auto& [regimen, ws] : relative_weights) {
        for (double w : ws) {
            if (!(w >= 0.0) || !std::isfinite(w)) {
                errs.push_back("prior.historical.relative_weight: must be non-negative for regimen '" + regimen + "'");
                break;
            }
        }
    }

    for (const auto& [name, p] : profiles) {
        const std::pair<const char*, double> rates[] = {
            {"ae_prob", p.ae}, {"completion_prob", p.completion}, {"non_tolerability_prob", p.non_tolerability}};
        for (const auto& [field, v] : rates) {
            if (!(v > 0.0 && v < 1.0)) errs.push_back("profiles." + name + "." + field + ": must lie strictly between 0 and 1");
        }
    }
    auto known_profile = [&](const std::string& n) { return profiles.count(n) || standard_profiles().count(n); };
    for (const auto& [name, s] : scenarios) {
        for (const auto& a : s.arms) {
            if (!known_profile(a)) errs.push_back("scenarios." + name + ".arms: unknown profile '" + a + "'");
        }
        if (!known_profile(s.reference)) errs.push_back("scenarios." + name + ".reference: unknown profile '" + s.reference + "'");
    }
    if (!scenarios.count(null_scenario)) errs.push_back("anchors.null_scenario: unknown scenario '" + null_scenario + "'");
    if (!scenarios.count(alt_scenario)) errs.push_back("anchors.alt_scenario: unknown scenario '" + alt_scenario + "'");

    if (replicates < 1) errs.push_back("simulation.replicates_count: must be at least 1");
    if (n_a <= 0) {
        errs.push_back("anchors.n_a_count: must be positive");
    } else {
        check_lag(errs, *this, "anchors.n_a_count", n_a);
    }
    if (n_b) {
        if (*n_b <= 0) {
            errs.push_back("anchors.n_b_count: must be positive");
        } else if (*n_b == n_a) {
            errs.push_back("anchors.n_b_count: must differ from n_a_count");
        } else {
            check_lag(errs, *this, "anchors.n_b_count", *n_b);
        }
    }
    if (search_lo <= 0 || search_hi < search_lo) {
        errs.push_back("search.n_min_count/n_max_count: need 0 < n_min_count <= n_max_count");
    } else {
        check_lag(errs, *this, "search.n_min_count", search_lo);
    }
    if (grid_lo <= 0 || grid_hi < grid_lo || grid_step <= 0) {
        errs.push_back("curves.n_min_count/n_max_count/n_step_count: need 0 < n_min_count <= n_max_count and n_step_count > 0");
    } else {
        check_lag(errs, *this, "curves.n_min_count", grid_lo);
    }
    if (report_n <= 0) {
        errs.push_back("curves.report_n_count: must be positive");
    } else {
        check_lag(errs, *this, "curves.report_n_count", report_n);
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
}

PriorRegistry DesignConfig::priors() const {
    PriorRegistry reg;
    auto map_prior = [&](const std::string& regimen) {
        auto it = relative_weights.find(regimen);
        return build_map_prior(historical, regimen, w1, vague,
                               it == relative_weights.end() ? std::vector<double>{} : it->second);
    };
    reg.set(kControlArm, 0, map_prior(control_regimen));
    reg.set(1, 0, map_prior(arm1_regimen));
    return reg;
}

ScenarioModel DesignConfig::scenario(const std::string& name) const {
    auto it = scenarios.find(name);
    if (it == scenarios.end()) throw ConfigError("unknown scenario '" + name + "'");
    auto profile = [&](const std::string& p) {
        if (auto f = profiles.find(p); f != profiles.end()) return f->second;
        if (auto f = standard_profiles().find(p); f != standard_profiles().end()) return f->second;
        throw ConfigError("scenario '" + name + "': unknown profile '" + p + "'");
    };
    const ScenarioSpec& s = it->second;
    return ScenarioModel::from_profiles(name, {profile(s.reference), profile(s.arms[0]), profile(s.arms[1]), profile(s.arms[2])},
                                        s.hypothesis);
}

std::vector<long> DesignConfig::grid() const {
    std::vector<long> g;
    for (long n = grid_lo; n <= grid_hi; n += grid_step) g.push_back(n);
    return g;
}

unsigned DesignConfig::threads() const {
    if (parallelism > 0) return parallelism;
    return std::max(1u, std::thread::hardware_concurrency());
}

Algorithm1Inputs DesignConfig::algorithm1_inputs() const {
    Algorithm1Inputs in;
    in.design = design;
    in.design.n_interim = n_a;
    in.null_scenario = scenario(null_scenario);
    in.alt_scenario = scenario(alt_scenario);
    in.priors = priors();
    in.replicates = replicates;
    in.seed = seed;
    in.n_a = n_a;
    in.n_b = n_b;
    in.search_lo = search_lo;
    in.search_hi = search_hi;
    in.thresholds = thresholds;
    in.calibrate = calibrate_kappa1;
    in.Gamma0 = Gamma0;
    in.Gamma1 = Gamma1;
    in.criterion = criterion;
    in.method = method;
    in.parallelism = threads();
    return in;
}

DesignConfig parse_config_string(std::string_view text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        throw ConfigError(os.str());
    }

    DesignConfig c;
    std::vector<std::string> errs;
    Reader top(&root, "", errs);
    {
        Reader r(top.table("design", true), "design", errs);
        if (r.present()) read_design(r, c);
    }
    {
        Reader r(top.table("thresholds", true), "thresholds", errs);
        if (r.present()) read_thresholds(r, c);
    }
    {
        Reader r(top.table("prior", true), "prior", errs);
        if (r.present()) read_prior(r, c, errs);
    }
    {
        Reader r(top.table("profiles"), "profiles", errs);
        if (r.present()) read_profiles(r, c, errs);
    }
    {
        Reader r(top.table("scenarios", true), "scenarios", errs);
        if (r.present()) read_scenarios(r, c, errs);
    }
    {
        Reader r(top.table("simulation", true), "simulation", errs);
        if (r.present()) read_simulation(r, c);
    }
    {
        Reader r(top.table("anchors", true), "anchors", errs);
        if (r.present()) read_anchors(r, c);
    }
    {
        Reader r(top.table("search"), "search", errs);
        if (r.present()) read_search(r, c);
    }
    {
        Reader r(top.table("curves"), "curves", errs);
        if (r.present()) read_curves(r, c);
    }
    {
        Reader r(top.table("output"), "output", errs);
        if (r.present()) {
            if (auto v = r.str("dir")) c.output_dir = *v;
            r.finish();
        }
    }
    top.finish();
    c.design.n_interim = c.n_a;
    if (!errs.empty()) throw ConfigError(std::move(errs));
    c.validate();
    return c;
}

DesignConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str(), path.string());
}

}  // namespace platdesign
