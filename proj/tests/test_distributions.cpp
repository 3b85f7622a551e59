#include "pitspec/distributions.hpp"

#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>

using namespace pitspec;

TEST(Normal, CdfAgainstBoost) {
    boost::math::normal_distribution<double> ref;
    for (double x = -8.0; x <= 8.0; x += 0.37) {
        EXPECT_NEAR(normal_cdf(x), boost::math::cdf(ref, x), 1e-15) << x;
    }
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(1.0), 0.8413447460685429, 1e-15);
}

TEST(Normal, QuantileInvertsCdf) {
    for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.5, 0.7, 0.97575, 0.999, 1 - 1e-6}) {
        const double x = normal_quantile(p);
        const double back = p < 0.5 ? normal_cdf(x) : 1.0 - normal_cdf(-x);
        EXPECT_NEAR(back / p, 1.0, 1e-12) << p;
    }
    EXPECT_THROW((void)normal_quantile(0.0), std::domain_error);
    EXPECT_THROW((void)normal_quantile(1.0), std::domain_error);
}

TEST(IncompleteBeta, AgainstBoost) {
    for (double a : {0.5, 1.0, 2.5, 7.0}) {
        for (double b : {0.5, 1.5, 4.0}) {
            for (double x : {0.01, 0.2, 0.5, 0.8, 0.99}) {
                EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-13);
            }
        }
    }
}

TEST(StudentT, CdfAgainstBoost) {
    for (double df : {1.0, 2.5, 5.0, 30.0}) {
        boost::math::students_t_distribution<double> ref(df);
        const StudentT t(df);
        for (double x = -20.0; x <= 20.0; x += 0.73) {
            EXPECT_NEAR(t.cdf(x), boost::math::cdf(ref, x), 1e-13) << "df " << df << " x " << x;
            EXPECT_NEAR(t.log_pdf(x), std::log(boost::math::pdf(ref, x)), 1e-12);
        }
    }
}

TEST(StudentT, QuantileCdfMutualInverse) {
    const StudentT t(5.0);
    for (double p = 1e-6; p < 1.0 - 1e-6; p += 0.0137) {
        EXPECT_NEAR(t.cdf(t.quantile(p)), p, 1e-10) << p;
    }
    for (double p : {1e-6, 1.0 - 1e-6}) {
        EXPECT_NEAR(t.cdf(t.quantile(p)), p, 1e-10);
    }
    boost::math::students_t_distribution<double> ref(5.0);
    EXPECT_NEAR(t.quantile(0.975), boost::math::quantile(ref, 0.975), 1e-10);
}

TEST(Innovation, StandardizedStudentHasUnitVariance) {
    const auto inn = Innovation::student_t(5.0);
    // Var of the raw t5 is 5/3; the standardized law's quantiles are scaled by sqrt(3/5).
    const StudentT raw(5.0);
    EXPECT_NEAR(inn.quantile(0.9), std::sqrt(0.6) * raw.quantile(0.9), 1e-12);
    // Numerical second moment of the density.
    double m2 = 0.0;
    const double h = 1e-3;
    for (double z = -200.0; z <= 200.0; z += h) m2 += z * z * std::exp(inn.log_pdf(z)) * h;
    EXPECT_NEAR(m2, 1.0, 2e-3);
    EXPECT_NEAR(inn.cdf(inn.quantile(0.3)), 0.3, 1e-12);
    EXPECT_THROW((void)Innovation::student_t(2.0), std::invalid_argument);
    EXPECT_NO_THROW((void)Innovation::student_t(2.0, false));
}

TEST(Innovation, Names) {
    EXPECT_EQ(Innovation::gaussian().name(), "n");
    EXPECT_EQ(Innovation::student_t(5.0).name(), "t5");
    EXPECT_EQ(Innovation::student_t(5.0, false).name(), "t5raw");
}
