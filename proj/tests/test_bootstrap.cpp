#include "pitspec/bootstrap.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace pitspec;

namespace {

ParamVector garch(double omega, double alpha, double beta) {
    ParamVector p;
    p.omega = omega;
    p.alpha = alpha;
    p.beta = beta;
    return p;
}

StatisticValue observed(double v) { return {StatisticSpec::adj0(1), v}; }

std::vector<double> replicates(std::size_t B, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> g(2.0, 0.05);
    std::vector<double> r(B);
    for (auto& v : r) v = g(rng);
    return r;
}

}  // namespace

TEST(Report, PValueConvention) {
    const auto reps = replicates(99, 1);
    const double top = *std::max_element(reps.begin(), reps.end());
    const auto rep = make_report(observed(top + 1.0), reps, 99, 7, 0);
    EXPECT_DOUBLE_EQ(rep.p_value, 1.0 / 100.0);
    const double bottom = *std::min_element(reps.begin(), reps.end());
    EXPECT_DOUBLE_EQ(make_report(observed(bottom), reps, 99, 7, 0).p_value, 1.0);
}

TEST(Decision, ExtremesAndLevels) {
    const auto reps = replicates(99, 2);
    const double top = *std::max_element(reps.begin(), reps.end());
    const double bottom = *std::min_element(reps.begin(), reps.end());
    const auto hi = make_report(observed(top + 1.0), reps, 99, 0, 0);
    const auto lo = make_report(observed(bottom), reps, 99, 0, 0);
    for (double level : kLevels) {
        EXPECT_TRUE(decision(hi, level));
        EXPECT_FALSE(decision(lo, level));
    }
    EXPECT_FALSE(decision(make_report(observed(bottom), replicates(20, 3), 20, 0, 0), 0.10));
    EXPECT_THROW((void)decision(hi, 0.2), std::invalid_argument);
}

TEST(Decision, ConsistentWithPValue) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 0.4);
    for (std::size_t B : {19u, 99u, 199u, 250u}) {
        const auto reps = replicates(B, B);
        for (int i = 0; i < 200; ++i) {
            const auto rep = make_report(observed(u(rng)), reps, B, 0, 0);
            for (double level : kLevels) {
                EXPECT_EQ(decision(rep, level), rep.p_value <= level + 1e-12) << "B " << B << " level " << level;
            }
        }
    }
}

TEST(CriticalValues, OrderedAndPermutationInvariant) {
    auto reps = replicates(199, 4);
    const auto rep = make_report(observed(0.1), reps, 199, 0, 0);
    EXPECT_LE(rep.critical_values.at(0.10), rep.critical_values.at(0.05));
    EXPECT_LE(rep.critical_values.at(0.05), rep.critical_values.at(0.01));
    std::shuffle(reps.begin(), reps.end(), std::mt19937_64(9));
    const auto shuffled = make_report(observed(0.1), reps, 199, 0, 0);
    EXPECT_EQ(shuffled.p_value, rep.p_value);
    EXPECT_EQ(shuffled.critical_values, rep.critical_values);
    EXPECT_TRUE(std::isinf(upper_critical_value(replicates(5, 1), 0.01)));
}

TEST(Stars, Table2Convention) {
    EXPECT_EQ(significance_stars(0.004), "***");
    EXPECT_EQ(significance_stars(0.03), "**");
    EXPECT_EQ(significance_stars(0.07), "*");
    EXPECT_EQ(significance_stars(0.5), "");
}

TEST(ParametricBootstrap, RejectsZeroReplicates) {
    const auto m = ConditionalModel::from_id("garch11-n");
    const auto y = m.simulate(garch(0.1, 0.1, 0.8), 100, 1);
    EXPECT_THROW((void)parametric_bootstrap(m, y, StatisticSpec::adj0(1), 0, 1), std::invalid_argument);
}

TEST(ParametricBootstrap, DeterministicAndSchedulingIndependent) {
    const auto m = ConditionalModel::from_id("garch11-n");
    const auto y = m.simulate(garch(0.1, 0.1, 0.8), 120, 2);
    const std::vector<StatisticSpec> specs{StatisticSpec::marginal(Norm::CvM), StatisticSpec::adj0(1),
                                           StatisticSpec::mdj(2)};
    BootstrapOptions serial;
    BootstrapOptions threaded;
    threaded.workers = 3;
    const auto a = parametric_bootstrap(m, y, specs, 24, 11, serial);
    const auto b = parametric_bootstrap(m, y, specs, 24, 11, threaded);
    ASSERT_EQ(a.reports.size(), 3u);
    for (std::size_t s = 0; s < specs.size(); ++s) {
        EXPECT_EQ(a.reports[s].replicates, b.reports[s].replicates);
        EXPECT_EQ(a.reports[s].p_value, b.reports[s].p_value);
        EXPECT_EQ(a.reports[s].observed.value, b.reports[s].observed.value);
        EXPECT_EQ(a.reports[s].B, 24u);
        EXPECT_EQ(a.reports[s].replicates.size() + a.reports[s].dropped, 24u);
    }
    // The single-statistic overload shares the replicate streams.
    const auto single = parametric_bootstrap(m, y, specs[1], 24, 11);
    EXPECT_EQ(single.replicates, a.reports[1].replicates);
    EXPECT_NE(parametric_bootstrap(m, y, specs[1], 24, 12).replicates, single.replicates);
}

TEST(ParametricBootstrap, MisspecifiedDynamicsAreDetected) {
    const auto dgp = ConditionalModel::from_id("ar1-garch11-n");
    ParamVector p = garch(0.1, 0.1, 0.8);
    p.ar1 = 0.8;
    const auto y = dgp.simulate(p, 300, 5);
    const auto rep = parametric_bootstrap(ConditionalModel::from_id("garch11-n"), y, StatisticSpec::adj0(1), 49, 3);
    EXPECT_DOUBLE_EQ(rep.p_value, 1.0 / 50.0);
    EXPECT_TRUE(decision(rep, 0.05));
}

TEST(ParametricBootstrap, UnstableRefitsRaise) {
    const auto m = ConditionalModel::from_id("garch11-n");
    const auto y = m.simulate(garch(0.1, 0.1, 0.8), 100, 3);
    BootstrapOptions opts;
    opts.refit.nelder_mead.max_evals = 10;  // refits cannot converge
    EXPECT_THROW((void)parametric_bootstrap(m, y, StatisticSpec::adj0(1), 10, 1, opts), BootstrapError);
}

TEST(ParametricBootstrap, ShortSeriesRejected) {
    const auto m = ConditionalModel::from_id("garch11-n");
    const auto y = m.simulate(garch(0.1, 0.1, 0.8), 40, 3);
    EXPECT_THROW((void)parametric_bootstrap(m, y, StatisticSpec::adj(40), 5, 1), std::invalid_argument);
}
