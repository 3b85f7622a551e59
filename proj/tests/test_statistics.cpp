#include "pitspec/statistics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "pitspec/process.hpp"

using namespace pitspec;

namespace {

UniformSequence seq(std::vector<double> v) { return UniformSequence(std::move(v)); }

}  // namespace

TEST(CvmLag, SinglePairClosedForm) {
    EXPECT_NEAR(cvm_lag(seq({0.5, 0.5}), 1).value, 0.25 - 2.0 * 0.140625 + 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(cvm_lag(seq({0.5, 0.5}), 1).value, 0.0798611111111111, 1e-12);
}

TEST(CvmMarginal, TwoPointClosedForm) {
    EXPECT_NEAR(cvm_marginal(seq({0.5, 0.5})).value, 1.0 / 6.0, 1e-15);
    EXPECT_THROW((void)cvm_marginal(seq({0.5})), std::invalid_argument);
    EXPECT_THROW((void)ks_marginal(seq({0.5})), std::invalid_argument);
}

TEST(KsLag, CornerExamples) {
    // closed corner at (0.5, 0.5)
    EXPECT_NEAR(ks_lag(seq({0.5, 0.5}), 1).value, 0.75, 1e-15);
    // Left-limit corners: just below (0.9, 0.9) the process is -r1 r2 = -0.81, but
    // along the edge r2 = 1 it reaches -0.9 as r1 -> 0.9 from below.
    EXPECT_NEAR(ks_lag(seq({0.9, 0.9}), 1).value, 0.9, 1e-15);
    EXPECT_NEAR(oracle::ks_grid({0.9, 0.9}, 1), 0.899, 1e-12);
}

TEST(KsLag, Errors) {
    EXPECT_THROW((void)ks_lag(seq({0.1, 0.2}), 2), std::invalid_argument);
    EXPECT_THROW((void)cvm_lag(seq({0.1, 0.2}), 0), std::invalid_argument);
}

TEST(CvmMarginal, EquispacedGridIsSmallAndMatchesQuadrature) {
    for (std::size_t n : {5u, 20u, 50u}) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const double v = cvm_marginal(seq(u)).value;
        // For the midpoint grid the classical identity gives exactly 1/(12 n).
        EXPECT_NEAR(v, 1.0 / (12.0 * n), 1e-14);
        EXPECT_NEAR(v, oracle::cvm_quadrature(u, 0, 4000), 2e-3);
    }
}

TEST(CvmLag, MatchesGridQuadratureOracle) {
    std::mt19937_64 rng(314);
    for (int rep = 0; rep < 20; ++rep) {
        const auto raw = oracle::random_uniforms(rng, 10 + 2 * rep);
        const auto u = seq(raw);
        EXPECT_NEAR(cvm_marginal(u).value, oracle::cvm_quadrature(raw, 0), 2e-3);
        for (std::size_t j : {1u, 2u, 5u}) {
            EXPECT_NEAR(cvm_lag(u, j).value, oracle::cvm_quadrature(raw, j), 2e-3) << "rep " << rep << " lag " << j;
        }
    }
}

TEST(KsLag, ExactSupremumDominatesGridWithinResolution) {
    std::mt19937_64 rng(2718);
    for (int rep = 0; rep < 10; ++rep) {
        const auto raw = oracle::random_uniforms(rng, 8 + 4 * rep);
        const auto u = seq(raw);
        for (std::size_t j : {0u, 1u, 3u}) {
            const double exact = j == 0 ? ks_marginal(u).value : ks_lag(u, j).value;
            const double grid = oracle::ks_grid(raw, j);
            EXPECT_GE(exact, grid - 1e-12);
            EXPECT_LE(exact - grid, oracle::ks_grid_resolution(raw.size() - j));
        }
    }
}

TEST(Properties, NonnegativityAndKsDominance) {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 200; ++rep) {
        const auto u = seq(oracle::random_uniforms(rng, 2 + rep % 40));
        EXPECT_GE(cvm_marginal(u).value, 0.0);
        EXPECT_GE(ks_marginal(u).value * ks_marginal(u).value, cvm_marginal(u).value - 1e-12);
        for (std::size_t j = 1; j < std::min<std::size_t>(u.size(), 4); ++j) {
            const double c = cvm_lag(u, j).value;
            const double k = ks_lag(u, j).value;
            EXPECT_GE(c, 0.0);
            EXPECT_GE(k * k, c - 1e-12);
            EXPECT_LE(k, std::sqrt(static_cast<double>(u.size() - j)) + 1e-12);
        }
    }
}

TEST(Properties, MarginalIsPermutationInvariantButLagIsNot) {
    std::mt19937_64 rng(4);
    const auto raw = oracle::random_uniforms(rng, 40);
    auto sorted = raw;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_NEAR(cvm_marginal(seq(raw)).value, cvm_marginal(seq(sorted)).value, 1e-12);
    EXPECT_NEAR(ks_marginal(seq(raw)).value, ks_marginal(seq(sorted)).value, 1e-12);
    // Sorting creates strong serial dependence the lag process must pick up.
    EXPECT_GT(std::abs(cvm_lag(seq(raw), 1).value - cvm_lag(seq(sorted), 1).value), 0.01);
}

TEST(Aggregate, DefinitionsAndMonotonicity) {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 30; ++rep) {
        const auto u = seq(oracle::random_uniforms(rng, 20 + rep));
        EXPECT_EQ(aggregate(u, 1, Scope::ADJ).value, cvm_lag(u, 1).value);
        double prev_adj = 0.0, prev_mdj = 0.0;
        for (std::size_t k = 1; k <= 6; ++k) {
            const double adj = aggregate(u, k, Scope::ADJ).value;
            const double mdj = aggregate(u, k, Scope::MDJ).value;
            EXPECT_GE(adj, prev_adj);
            EXPECT_GE(mdj, prev_mdj);
            EXPECT_GE(aggregate(u, k, Scope::ADJ0).value, adj);
            EXPECT_GE(aggregate(u, k, Scope::MDJ0).value, mdj);
            EXPECT_NEAR(aggregate(u, k, Scope::ADJ0).value, adj + cvm_marginal(u).value, 1e-12);
            prev_adj = adj;
            prev_mdj = mdj;
        }
    }
    EXPECT_THROW((void)aggregate(seq({0.1, 0.2, 0.3}), 3, Scope::ADJ), std::invalid_argument);
    EXPECT_THROW((void)aggregate(seq({0.1, 0.2, 0.3}), 1, Scope::Lag), std::invalid_argument);
}

TEST(PWise, PairsMatchLagOne) {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 30; ++rep) {
        const auto u = seq(oracle::random_uniforms(rng, 3 + rep));
        EXPECT_NEAR(cvm_pwise(u, 2).value, cvm_lag(u, 1).value, 1e-13);
        EXPECT_NEAR(ks_pwise(u, 2).value, ks_lag(u, 1).value, 1e-13);
    }
}

TEST(PWise, SingleWindowExample) {
    // One window (0.5, 0.5, 0.5): V(r) = I(r >= 0.5)^3 - r1 r2 r3.
    const auto u = seq({0.5, 0.5, 0.5});
    EXPECT_NEAR(ks_pwise(u, 3).value, 0.875, 1e-15);
    // int (I - prod r)^2 = 1/8 - 2 (3/8)^3 + 1/27
    EXPECT_NEAR(cvm_pwise(u, 3).value, 0.125 - 2.0 * std::pow(0.375, 3) + 1.0 / 27.0, 1e-15);
}

TEST(PWise, TripleMatchesBruteForceGrid) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 5; ++rep) {
        const auto raw = oracle::random_uniforms(rng, 12);
        const auto u = seq(raw);
        // Brute-force midpoint quadrature and grid max in three dimensions.
        constexpr std::size_t cells = 60;
        double cvm = 0.0, grid_max = 0.0;
        const double m = static_cast<double>(raw.size() - 2);
        for (std::size_t a = 0; a < cells; ++a)
            for (std::size_t b = 0; b < cells; ++b)
                for (std::size_t c = 0; c < cells; ++c) {
                    const double r[3] = {(a + 0.5) / cells, (b + 0.5) / cells, (c + 0.5) / cells};
                    double cnt = 0.0;
                    for (std::size_t t = 2; t < raw.size(); ++t)
                        cnt += (raw[t] <= r[0]) && (raw[t - 1] <= r[1]) && (raw[t - 2] <= r[2]);
                    const double v = (cnt - m * r[0] * r[1] * r[2]) / std::sqrt(m);
                    cvm += v * v / (cells * cells * cells);
                    grid_max = std::max(grid_max, std::abs(v));
                }
        EXPECT_NEAR(cvm_pwise(u, 3).value, cvm, 2e-2);
        EXPECT_GE(ks_pwise(u, 3).value, grid_max - 1e-12);
        for (int probe = 0; probe < 200; ++probe) {
            const EvalPoint r{unif(rng), unif(rng), unif(rng)};
            EXPECT_GE(ks_pwise(u, 3).value, std::abs(eval_vp(u, 3, r)) - 1e-12);
        }
    }
}

TEST(PWise, QuadrupleBounds) {
    std::mt19937_64 rng(3);
    const auto u = seq(oracle::random_uniforms(rng, 25));
    const double ks = ks_pwise(u, 4).value;
    const double cvm = cvm_pwise(u, 4).value;
    EXPECT_GE(ks * ks, cvm);
    EXPECT_THROW((void)ks_pwise(u, 5), std::invalid_argument);
}

TEST(StatisticSpec, NameRoundTrip) {
    const StatisticSpec specs[] = {StatisticSpec::marginal(Norm::CvM), StatisticSpec::marginal(Norm::KS),
                                   StatisticSpec::lag(Norm::CvM, 3),   StatisticSpec::lag(Norm::KS, 2),
                                   StatisticSpec::pwise(Norm::KS, 3),  StatisticSpec::adj(5),
                                   StatisticSpec::mdj(1),              StatisticSpec::adj0(2),
                                   StatisticSpec::mdj0(4)};
    for (const auto& s : specs) {
        EXPECT_EQ(StatisticSpec::parse(s.name()), s) << s.name();
    }
    EXPECT_THROW((void)StatisticSpec::parse("ADJ_0"), std::invalid_argument);
    EXPECT_THROW((void)StatisticSpec::parse("FOO_1"), std::invalid_argument);
    EXPECT_THROW((void)StatisticSpec::parse("ADJ_x"), std::invalid_argument);
}

TEST(StatisticEvaluator, BatchMatchesIndividualCalls) {
    std::mt19937_64 rng(6);
    const auto u = seq(oracle::random_uniforms(rng, 60));
    const std::vector<StatisticSpec> specs{StatisticSpec::marginal(Norm::CvM), StatisticSpec::adj(1),
                                           StatisticSpec::adj(5), StatisticSpec::marginal(Norm::KS),
                                           StatisticSpec::mdj(1), StatisticSpec::mdj(5)};
    StatisticEvaluator ev(u);
    const auto batch = ev.evaluate(specs);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        EXPECT_DOUBLE_EQ(batch[i], compute(specs[i], u).value);
    }
}
