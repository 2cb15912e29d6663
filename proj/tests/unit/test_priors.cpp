#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mp_oracle.hpp"
#include "platdesign/errors.hpp"
#include "platdesign/priors.hpp"

using namespace platdesign;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

MixtureDistribution two(double w, BetaParams a, BetaParams b) {
    return MixtureDistribution({{w, a, "a"}, {1.0 - w, b, "b"}});
}

}  // namespace

TEST_CASE("MAP prior for 4R10 from the historical table") {
    const auto m = build_map_prior(HistoricalTable::sstarlet(), "4R10", 0.5);
    REQUIRE(m.size() == 5);
    const std::vector<std::pair<double, double>> expect = {{16, 426}, {16, 408}, {16, 379}, {3, 57}, {1, 1}};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(m.components()[i].params.alpha == expect[i].first);
        CHECK(m.components()[i].params.beta == expect[i].second);
        CHECK(m.components()[i].weight == doctest::Approx(i < 4 ? 0.125 : 0.5).epsilon(1e-15));
    }
}

TEST_CASE("MAP prior for 2R20") {
    const auto m = build_map_prior(HistoricalTable::sstarlet(), "2R20", 0.5);
    REQUIRE(m.size() == 2);
    CHECK(m.components()[0].params == BetaParams(9, 434));
    CHECK(m.components()[0].weight == 0.5);
    CHECK(m.components()[1].params == BetaParams(1, 1));
}

TEST_CASE("MAP prior edge cases") {
    const auto vague_only = build_map_prior(HistoricalTable::sstarlet(), "4R10", 0.0);
    REQUIRE(vague_only.size() == 1);
    CHECK(vague_only.components()[0].params == BetaParams(1, 1));
    CHECK_THROWS_AS(build_map_prior(HistoricalTable::sstarlet(), "9X9", 0.5), ConfigError);
    CHECK_THROWS_AS(build_map_prior(HistoricalTable::sstarlet(), "4R10", 1.5), ConfigError);
    const auto weighted = build_map_prior(HistoricalTable::sstarlet(), "4R10", 0.5, BetaParams(1, 1), {2, 1, 1, 0});
    REQUIRE(weighted.size() == 4);
    CHECK(weighted.components()[0].weight == doctest::Approx(0.25));
}

TEST_CASE("log marginal likelihood") {
    CHECK(log_marginal_likelihood(BetaParams(1, 1), 0, 0) == 0.0);
    CHECK(log_marginal_likelihood(BetaParams(1, 1), 3, 10) == doctest::Approx(-7.1853870155804165383).epsilon(1e-13));
    CHECK(log_marginal_likelihood(BetaParams(9, 434), 8, 441) ==
          doctest::Approx(-40.354468596759594653).epsilon(1e-13));
    CHECK_THROWS_AS(log_marginal_likelihood(BetaParams(1, 1), 11, 10), DomainError);
}

TEST_CASE("conjugate update") {
    const auto post = update_mixture(MixtureDistribution(BetaParams(1, 1)), 0, 10);
    REQUIRE(post.size() == 1);
    CHECK(post.components()[0].params == BetaParams(1, 11));
    CHECK(post.components()[0].weight == 1.0);
    for (long y : {0L, 3L, 17L}) {
        const auto p = update_mixture(MixtureDistribution(BetaParams(1, 1)), y, 40);
        CHECK(p.components()[0].params == BetaParams(1.0 + static_cast<double>(y), 1.0 + 40.0 - static_cast<double>(y)));
    }
    CHECK_THROWS_AS(update_mixture(MixtureDistribution(BetaParams(1, 1)), 5, 4), DomainError);
}

TEST_CASE("identical components keep their weights") {
    const auto p = update_mixture(two(0.5, BetaParams(1, 1), BetaParams(1, 1)), 7, 30);
    CHECK(p.components()[0].weight == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.components()[1].weight == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("2R20 posterior weights at y=2, n=100") {
    const auto prior = build_map_prior(HistoricalTable::sstarlet(), "2R20", 0.5);
    const auto p = update_mixture(prior, 2, 100);
    CHECK(rel(p.components()[0].weight, 0.96143561985140629995) < 1e-12);
    CHECK(rel(p.components()[1].weight, 0.038564380148593700047) < 1e-11);
    CHECK(p.components()[0].weight > 0.5);
}

TEST_CASE("posterior weights agree with the MPFR reference") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ab(0.5, 600.0), u(0.05, 1.0);
    std::uniform_int_distribution<int> k(1, 5);
    for (int trial = 0; trial < 100; ++trial) {
        const int K = k(rng);
        std::vector<MixtureComponent> comps;
        std::vector<oracle::Component> ref;
        double total = 0.0;
        std::vector<double> raw;
        for (int c = 0; c < K; ++c) raw.push_back(u(rng)), total += raw.back();
        for (int c = 0; c < K; ++c) {
            const double a = ab(rng), b = ab(rng);
            comps.push_back({raw[static_cast<std::size_t>(c)] / total, BetaParams(a, b), ""});
            ref.push_back({raw[static_cast<std::size_t>(c)] / total, a, b});
        }
        const long n = std::uniform_int_distribution<long>(0, 1500)(rng);
        const long y = std::uniform_int_distribution<long>(0, n)(rng);
        const auto post = update_mixture(MixtureDistribution(comps), y, n);
        const auto expect = oracle::posterior_weights(ref, y, n);
        double sum = 0.0;
        for (int c = 0; c < K; ++c) {
            const double w = post.components()[static_cast<std::size_t>(c)].weight;
            const double e = expect[static_cast<std::size_t>(c)];
            sum += w;
            if (e > 1e-200) CHECK(rel(w, e) < 1e-10);
        }
        CHECK(std::fabs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("posterior weights sum to one") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ab(0.2, 1000.0);
    for (int i = 0; i < 1000; ++i) {
        const auto m = two(0.3, BetaParams(ab(rng), ab(rng)), BetaParams(ab(rng), ab(rng)));
        const long n = std::uniform_int_distribution<long>(0, 2000)(rng);
        const long y = std::uniform_int_distribution<long>(0, n)(rng);
        const auto p = update_mixture(m, y, n);
        CHECK(std::fabs(p.components()[0].weight + p.components()[1].weight - 1.0) < 1e-12);
    }
}

TEST_CASE("prior-data conflict lowers the informative weight") {
    const auto prior = build_map_prior(HistoricalTable::sstarlet(), "2R20", 0.5);
    double last = 2.0;
    for (double rate : {0.02, 0.10, 0.20}) {
        const long n = 400;
        const auto p = update_mixture(prior, std::lround(rate * n), n);
        const double w = p.components()[0].weight;
        CHECK(w < last);
        last = w;
    }
}

TEST_CASE("component order does not matter") {
    const std::vector<MixtureComponent> a = {
        {0.2, BetaParams(16, 426), "h1"}, {0.3, BetaParams(3, 57), "h2"}, {0.5, BetaParams(1, 1), "v"}};
    std::vector<MixtureComponent> b = {a[2], a[0], a[1]};
    const auto pa = update_mixture(MixtureDistribution(a), 12, 300);
    const auto pb = update_mixture(MixtureDistribution(b), 12, 300);
    for (const auto& c : pa.components()) {
        const auto it = std::find_if(pb.components().begin(), pb.components().end(),
                                     [&](const MixtureComponent& d) { return d.label == c.label; });
        REQUIRE(it != pb.components().end());
        CHECK(it->params == c.params);
        CHECK(std::fabs(it->weight - c.weight) < 1e-15);
    }
}

TEST_CASE("mixture cdf") {
    const auto m = two(0.5, BetaParams(1, 1), BetaParams(1, 1));
    CHECK(mixture_cdf(m, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(mixture_cdf(m, 1.0) == 1.0);
    const auto post = update_mixture(build_map_prior(HistoricalTable::sstarlet(), "4R10", 0.5), 15, 440);
    CHECK(mixture_cdf(post, 0.04) == doctest::Approx(0.73751958235397432142).epsilon(1e-11));
    CHECK(mixture_cdf(post, 1.0) == 1.0);
}

TEST_CASE("mixture validation") {
    CHECK_THROWS_AS(MixtureDistribution(std::vector<MixtureComponent>{}), ConfigError);
    CHECK_THROWS_AS(MixtureDistribution({{0.4, BetaParams(1, 1), ""}, {0.4, BetaParams(2, 2), ""}}), ConfigError);
    CHECK_THROWS_AS(MixtureDistribution({{-0.1, BetaParams(1, 1), ""}, {1.1, BetaParams(2, 2), ""}}), ConfigError);
}

TEST_CASE("historical table validation") {
    HistoricalTable t = HistoricalTable::sstarlet();
    t.rows[0].events = 500;
    CHECK_THROWS_AS(t.validate(), ConfigError);
}

TEST_CASE("prior registry layout") {
    const auto reg = PriorRegistry::sstarlet(HistoricalTable::sstarlet());
    CHECK(reg.at(0, 0).size() == 5);
    CHECK(reg.at(1, 0).size() == 2);
    for (int arm = 0; arm < 4; ++arm) {
        for (int k = 0; k < 3; ++k) {
            if ((arm == 0 || arm == 1) && k == 0) continue;
            REQUIRE(reg.at(arm, k).size() == 1);
            CHECK(reg.at(arm, k).components()[0].params == BetaParams(1, 1));
        }
    }
    CHECK_THROWS(reg.at(4, 0));
}
