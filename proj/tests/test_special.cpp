// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "curse/special.hpp"

TEST(Special, ZetaAgreesWithBoost) {
    for (double s : {1.05, 1.25, 1.5, 2.0, 3.0, 7.5}) {
        const double expected = boost::math::zeta(s);
        EXPECT_NEAR(curse::riemann_zeta(s), expected, 1e-12 * expected) << s;
    }
}

TEST(Special, ZetaTwoIsPiSquaredOverSix) {
    EXPECT_NEAR(curse::riemann_zeta(2.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-14);
}

TEST(Special, ZetaTailMatchesBoostMinusPartialSum) {
    for (double s : {1.1, 2.0, 4.0}) {
        for (long long first : {1LL, 2LL, 10LL, 1000LL}) {
            double partial = 0.0;
            for (long long j = 1; j < first; ++j) partial += std::pow(static_cast<double>(j), -s);
            const double expected = boost::math::zeta(s) - partial;
            EXPECT_NEAR(curse::zeta_tail(s, first), expected, 1e-11 * boost::math::zeta(s)) << s << " " << first;
        }
    }
}

TEST(Special, LogFactorial) {
    EXPECT_DOUBLE_EQ(curse::log_factorial(0), 0.0);
    EXPECT_DOUBLE_EQ(curse::log_factorial(1), 0.0);
    EXPECT_NEAR(curse::log_factorial(5), std::log(120.0), 1e-13);
    EXPECT_NEAR(curse::log_factorial(170), std::lgamma(171.0), 1e-10);
}
