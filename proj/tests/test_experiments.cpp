#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "wd/experiments.hpp"

using namespace wd;

namespace {

SweepConfig small_sweep(Scheme scheme) {
    SweepConfig cfg;
    cfg.scheme = scheme;
    cfg.source = SourceSpec(2, {0.5, 0.5});
    cfg.cost = CostMatrix::uniform(2, 1.0);
    cfg.sigma_grid = {8.0, 16.0, 32.0, 64.0};
    cfg.trials = 24;
    cfg.seed = 31;
    cfg.min_windows = 64;
    return cfg;
}

} // namespace

TEST_CASE("exponent fit recovers exact power laws") {
    std::vector<double> sigma{10.0, 100.0, 1000.0, 10000.0};

    SECTION("y = sigma^{-1/2}") {
        std::vector<double> y;
        for (double s : sigma) y.push_back(1.0 / std::sqrt(s));
        const ExponentFit fit = fit_loglog(sigma, y);
        CHECK_THAT(fit.slope, Catch::Matchers::WithinAbs(-0.5, 1e-12));
        CHECK_THAT(fit.r_squared, Catch::Matchers::WithinAbs(1.0, 1e-12));
    }

    SECTION("y = 3 sigma^{-1}") {
        std::vector<double> y;
        for (double s : sigma) y.push_back(3.0 / s);
        const ExponentFit fit = fit_loglog(sigma, y);
        CHECK_THAT(fit.slope, Catch::Matchers::WithinAbs(-1.0, 1e-12));
        CHECK_THAT(fit.intercept, Catch::Matchers::WithinAbs(std::log10(3.0), 1e-12));
    }

    SECTION("too few points or nonpositive values are errors") {
        CHECK_THROWS_AS(fit_loglog(std::vector<double>{1.0, 2.0, 4.0}, std::vector<double>{1, 1, 1}),
                        validation_error);
        CHECK_THROWS_WITH(fit_loglog(std::vector<double>{1.0, 2.0, 4.0, 8.0},
                                     std::vector<double>{1.0, 0.0, 1.0, 1.0}),
                          Catch::Matchers::ContainsSubstring("sigma=2"));
    }
}

TEST_CASE("sweep determinism is independent of the worker count") {
    SweepConfig cfg = small_sweep(Scheme::Permutation);
    cfg.sigma_grid = {8.0, 16.0};
    cfg.trials = 12;
    cfg.workers = 1;
    const SweepResult a = run_sweep(cfg);
    cfg.workers = 3;
    const SweepResult b = run_sweep(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].mean_distortion == b.rows[i].mean_distortion);
        CHECK(a.rows[i].std_error == b.rows[i].std_error);
        CHECK(a.rows[i].rate == b.rows[i].rate);
    }
}

TEST_CASE("independent-scheme rows carry zero rate and finite stats") {
    SweepConfig cfg = small_sweep(Scheme::Independent);
    cfg.sigma_grid = {8.0, 16.0};
    cfg.trials = 8;
    const SweepResult res = run_sweep(cfg);
    for (const SweepRow& row : res.rows) {
        CHECK(row.rate == 0.0);
        CHECK(row.k == 0);
        CHECK(row.mean_distortion >= 0.0);
        CHECK(row.mean_distortion <= 1.0);
        CHECK(row.std_error > 0.0);
        CHECK(row.bound_value > 0.0);
    }
}

TEST_CASE("permutation rate is exact, bit for bit") {
    SweepConfig cfg = small_sweep(Scheme::Permutation);
    cfg.sigma_grid = {16.0};
    cfg.trials = 4;
    const SweepResult res = run_sweep(cfg);
    const SweepRow& row = res.rows[0];
    const std::int64_t L = 2 * row.N + 1;
    const double expected = static_cast<double>((2 - 1) * bits_per_count(row.k) * (L / row.k)) /
                            static_cast<double>(L);
    CHECK(row.rate == expected);
}

TEST_CASE("k=1 yields exactly zero distortion at every sigma") {
    SweepConfig cfg = small_sweep(Scheme::Permutation);
    cfg.fixed_k = 1;
    cfg.trials = 6;
    const SweepResult res = run_sweep(cfg);
    for (const SweepRow& row : res.rows) {
        CHECK(row.mean_distortion == 0.0);
        CHECK(row.std_error == 0.0);
        CHECK(row.rate > 0.99); // ceil(log2 2) * (A-1) per covered symbol
    }
}

TEST_CASE("doubling trials shrinks the standard error by about sqrt(2)") {
    SweepConfig cfg = small_sweep(Scheme::Independent);
    cfg.sigma_grid = {16.0};
    cfg.trials = 200;
    const double se1 = run_sweep(cfg).rows[0].std_error;
    cfg.trials = 400;
    const double se2 = run_sweep(cfg).rows[0].std_error;
    const double ratio = se2 / se1;
    CHECK(ratio > (1.0 / std::sqrt(2.0)) * 0.85);
    CHECK(ratio < (1.0 / std::sqrt(2.0)) * 1.15);
}

TEST_CASE("infeasible N/k combinations are rejected before sampling") {
    SweepConfig cfg = small_sweep(Scheme::Permutation);
    cfg.sigma_grid = {64.0};
    cfg.fixed_k = 8;
    cfg.fixed_N = 12; // coverage 8*floor(25/8)/25 = 0.64 < 0.99
    CHECK_THROWS_WITH(run_sweep(cfg), Catch::Matchers::ContainsSubstring("infeasible"));
}

TEST_CASE("measured distortion stays below the analytic bounds") {
    SweepConfig cfg = small_sweep(Scheme::Independent);
    cfg.sigma_grid = {4.0, 16.0, 64.0, 256.0};
    cfg.trials = 60;
    for (int A : {2, 3}) {
        std::vector<double> pmf(static_cast<std::size_t>(A), 1.0 / A);
        cfg.source = SourceSpec(A, DiscreteDistribution::normalized(pmf).weights());
        cfg.cost = CostMatrix::uniform(A, 1.0);
        for (Scheme scheme : {Scheme::Independent, Scheme::Permutation}) {
            cfg.scheme = scheme;
            const SweepResult res = run_sweep(cfg);
            for (const SweepRow& row : res.rows) {
                INFO(to_string(scheme) << " A=" << A << " sigma=" << row.sigma);
                CHECK(row.mean_distortion <= row.bound_value + 3.0 * row.std_error);
            }
        }
    }
}

TEST_CASE("fidelity limit experiment") {
    SECTION("identical sequences give zero error everywhere") {
        const auto z = [](std::int64_t k) { return hash01(k); };
        const LimitTable t = fidelity_limit_experiment(z, z, {1.0, 0.5, 0.1, 0.0}, 2.0);
        for (const LimitRow& row : t.rows) CHECK(row.abs_error == 0.0);
    }

    SECTION("frozen bounded fixture decreases toward the exact limit") {
        const auto z = [](std::int64_t k) { return hash01(k); };
        const auto zh = [](std::int64_t k) { return hash01(k + 100000) * 0.9 + 0.05; };
        const LimitTable t =
            fidelity_limit_experiment(z, zh, {1.0, 0.5, 0.2, 0.1, 0.05, 0.0}, 2.0);
        CHECK(t.rows.back().abs_error == 0.0); // sigma = 0 row is exact
        CHECK(t.tail_decreasing);
        // frozen thresholds calibrated on this fixture
        CHECK(t.rows[3].abs_error < 1e-4);  // sigma = 0.1
        CHECK(t.rows[4].abs_error < 1e-8);  // sigma = 0.05
        const double target = t.rows[0].target;
        const LimitTable example =
            fidelity_limit_experiment(z, zh, {1.0, 0.5, 0.1, 0.01}, 2.0);
        CHECK(example.rows.back().abs_error < 0.05 * target + 1e-6);
    }

    SECTION("grid must decrease") {
        const auto z = [](std::int64_t k) { return hash01(k); };
        CHECK_THROWS_AS(fidelity_limit_experiment(z, z, {0.1, 0.5}, 2.0), validation_error);
    }
}

TEST_CASE("realism limit experiment") {
    const SourceSpec p(2, {0.5, 0.5});
    const SourceSpec ph(2, {0.8, 0.2});
    const CostMatrix d = CostMatrix::uniform(2, 1.0);

    SECTION("identical laws drive the distortion toward zero") {
        const LimitTable t = realism_limit_experiment(p, p, {10.0, 100.0, 1000.0}, d, 5);
        CHECK(t.rows.back().target == 0.0);
        CHECK(t.rows.back().value < 0.05);
        CHECK(t.rows.back().value < t.rows.front().value);
    }

    SECTION("closed-form target for distinct laws") {
        const LimitTable t = realism_limit_experiment(p, ph, {100.0, 1000.0}, d, 5);
        CHECK_THAT(t.rows[0].target, Catch::Matchers::WithinAbs(0.3, 1e-15));
        CHECK(t.rows.back().abs_error < 0.1);
    }
}

TEST_CASE("region report") {
    const double neg_inf = -std::numeric_limits<double>::infinity();

    SECTION("measured pairs from both schemes classify as achievable") {
        const RegionReport rep = region_report(
            {{"independent", neg_inf, -0.49}, {"permutation", -0.5, -0.97}},
            {{"converse-corner", -3.0, -0.5}});
        REQUIRE(rep.rows.size() == 3);
        CHECK(rep.rows[0].cls == RegionClass::Achievable);
        CHECK(rep.rows[1].cls == RegionClass::Achievable);
        CHECK(rep.rows[2].cls == RegionClass::NotAchievable);
        CHECK(rep.boundary.size() == 4);
    }

    SECTION("a measured pair inside the converse region is a hard failure") {
        CHECK_THROWS_AS(region_report({{"buggy", -3.0, -0.5}}), check_failure);
    }
}

TEST_CASE("scheme rate exponents") {
    SweepConfig cfg = small_sweep(Scheme::Independent);
    CHECK(scheme_rate_exponent(cfg) == -std::numeric_limits<double>::infinity());
    cfg.scheme = Scheme::Permutation;
    cfg.gamma = 0.5;
    CHECK(scheme_rate_exponent(cfg) == -0.5);
}
