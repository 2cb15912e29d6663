#include <doctest.h>

#include <fstream>
#include <sstream>

#include "platdesign/config.hpp"
#include "platdesign/errors.hpp"

using namespace platdesign;

namespace {

std::string slurp(const std::string& rel) {
    std::ifstream in(std::string(PLATDESIGN_SOURCE_DIR) + "/" + rel);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string bundled() { return slurp("configs/sstarlet.toml"); }

std::string replace(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    REQUIRE_MESSAGE(pos != std::string::npos, from);
    return text.replace(pos, from.size(), to);
}

std::string errors_of(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("bundled configs parse") {
    const auto c = parse_config(std::string(PLATDESIGN_SOURCE_DIR) + "/configs/sstarlet.toml");
    CHECK(c.n_a == 600);
    CHECK(c.n_b == 1000);
    CHECK(c.design.c2 == 2.5);
    CHECK(c.design.n_interim == 600);
    CHECK(c.thresholds.gamma == std::array<double, 3>{0.2, 0.5, 0.5});
    CHECK(c.thresholds.kappa1 == 0.975);
    CHECK(c.replicates == 10000);
    CHECK(c.historical == HistoricalTable::sstarlet());
    CHECK(c.grid() == std::vector<long>{400, 500, 600, 700, 800, 900, 1000, 1100, 1200});
    CHECK(c.scenario("psi0").hypothesis == Hypothesis::null);
    CHECK(c.scenario("psi1").theta[3][0] == 0.02);
    const auto smoke = parse_config(std::string(PLATDESIGN_SOURCE_DIR) + "/configs/smoke.toml");
    CHECK(smoke.replicates == 500);
}

TEST_CASE("optional fields take defaults") {
    auto text = replace(bundled(), "w1_prob = 0.5\n", "");
    text = replace(text, "[search]\nn_min_count = 400\nn_max_count = 1600\n", "");
    const auto c = parse_config_string(text);
    CHECK(c.w1 == 0.5);
    CHECK(c.search_lo == 400);
    CHECK(c.search_hi == 1600);
}

TEST_CASE("lag constraint names the anchor field") {
    auto text = replace(bundled(), "c2_ratio = 2.5", "c2_ratio = 1.4");
    const auto msg = errors_of(text);
    CHECK(msg.find("anchors.n_a_count: lag constraint violated") != std::string::npos);
}

TEST_CASE("strict mode") {
    CHECK(errors_of(replace(bundled(), "[design]\n", "[design]\nbogus_count = 3\n")).find("design.bogus_count: unknown key") !=
          std::string::npos);
    CHECK(errors_of(replace(bundled(), "[output]", "[extra]\nx = 1\n[output]")).find("extra: unknown key") !=
          std::string::npos);
    CHECK(errors_of(replace(bundled(), "seed = 20240607", "seed = \"abc\"")).find("simulation.seed: expected an integer") !=
          std::string::npos);
    CHECK(errors_of(replace(bundled(), "kappa1_prob = 0.975\n", "")).find("thresholds.kappa1_prob: required") !=
          std::string::npos);
    CHECK(errors_of(replace(bundled(), "alt_scenario = \"psi1\"", "alt_scenario = \"psi9\"")).find("anchors.alt_scenario") !=
          std::string::npos);
    CHECK(errors_of("not = [valid").find("<string>:") != std::string::npos);
    CHECK_THROWS_AS(parse_config("/nonexistent/file.toml"), IoError);
}

TEST_CASE("every numeric field is range-checked by name") {
    const std::vector<std::pair<std::string, std::pair<std::string, std::string>>> mutations = {
        {"design.c2_ratio", {"c2_ratio = 2.5", "c2_ratio = 0.5"}},
        {"design.lag_count", {"lag_count = 300", "lag_count = -1"}},
        {"design.stage1_ratio", {"stage1_ratio = [1.0, 2.0, 2.0]", "stage1_ratio = [1.0, -2.0, 2.0]"}},
        {"design.lag_new_arm_share_prob", {"lag_new_arm_share_prob = 0.5", "lag_new_arm_share_prob = 1.5"}},
        {"design.post_new_arm_share_prob", {"post_new_arm_share_prob = 0.5", "post_new_arm_share_prob = -0.5"}},
        {"design.margin_probs", {"margin_probs = [0.04, 0.10, 0.10]", "margin_probs = [0.04, 1.10, 0.10]"}},
        {"thresholds.gamma_probs", {"gamma_probs = [0.2, 0.5, 0.5]", "gamma_probs = [0.2, 1.5, 0.5]"}},
        {"thresholds.kappa1_prob", {"kappa1_prob = 0.975", "kappa1_prob = 1.975"}},
        {"thresholds.kappa23_probs", {"kappa23_probs = [0.99, 0.99]", "kappa23_probs = [0.99, 2.0]"}},
        {"thresholds.fwer_target_prob", {"fwer_target_prob = 0.05", "fwer_target_prob = -0.05"}},
        {"thresholds.power_target_prob", {"power_target_prob = 0.95", "power_target_prob = 1.95"}},
        {"prior.w1_prob", {"w1_prob = 0.5", "w1_prob = 1.5"}},
        {"prior.vague_alpha", {"vague_alpha = 1.0", "vague_alpha = -1.0"}},
        {"prior.historical", {"events_count = 8", "events_count = 800"}},
        {"simulation.replicates_count", {"replicates_count = 10000", "replicates_count = 0"}},
        {"simulation.quadrature_order_count", {"quadrature_order_count = 128", "quadrature_order_count = 1"}},
        {"simulation.parallelism_count", {"parallelism_count = 0", "parallelism_count = -2"}},
        {"anchors.n_a_count", {"n_a_count = 600", "n_a_count = 100"}},
        {"anchors.n_b_count", {"n_b_count = 1000", "n_b_count = 150"}},
        {"search.n_min_count", {"n_min_count = 400\nn_max_count = 1600", "n_min_count = 150\nn_max_count = 1600"}},
        {"curves.n_min_count", {"n_min_count = 400\nn_max_count = 1200", "n_min_count = 100\nn_max_count = 1200"}},
        {"curves.report_n_count", {"report_n_count = 674", "report_n_count = 10"}},
    };
    for (const auto& [field, m] : mutations) {
        const auto msg = errors_of(replace(bundled(), m.first, m.second));
        CHECK_MESSAGE(msg.find(field) != std::string::npos, field << " -> " << msg);
    }
}

TEST_CASE("profiles and scenarios") {
    const std::string extra =
        "[profiles.mild]\nae_prob = 0.025\ncompletion_prob = 0.74\nnon_tolerability_prob = 0.26\n\n"
        "[scenarios.mixed]\narms = [\"mild\", \"acceptable\", \"unacceptable\"]\nhypothesis = \"alternative\"\n\n";
    const auto c = parse_config_string(replace(bundled(), "[simulation]", extra + "[simulation]"));
    const auto sc = c.scenario("mixed");
    CHECK(sc.theta[1][0] == 0.025);
    CHECK(sc.theta[1][1] == doctest::Approx(0.26));
    CHECK(sc.theta[3][0] == 0.06);
    const std::string bad = "[profiles.bad]\nae_prob = 1.5\ncompletion_prob = 0.74\nnon_tolerability_prob = 0.26\n\n";
    CHECK(errors_of(replace(bundled(), "[simulation]", bad + "[simulation]")).find("profiles.bad.ae_prob") !=
          std::string::npos);
    CHECK_THROWS_AS(c.scenario("nope"), ConfigError);
}

TEST_CASE("algorithm inputs mirror the config") {
    const auto c = parse_config_string(bundled());
    const auto in = c.algorithm1_inputs();
    CHECK(in.n_a == 600);
    CHECK(in.n_b == 1000);
    CHECK(in.replicates == 10000);
    CHECK(in.null_scenario.label == "psi0");
    CHECK(in.alt_scenario.label == "psi1");
    CHECK(in.priors.at(0, 0).size() == 5);
    CHECK(in.parallelism >= 1);
    CHECK(in.calibrate);
}
