// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "curse/errors.hpp"
#include "curse/geometry.hpp"

using namespace curse;

namespace {

double lp_norm(const std::vector<double>& x, double p) {
    double acc = 0.0;
    for (double v : x) acc += std::pow(std::abs(v), p);
    return std::pow(acc, 1.0 / p);
}

}  // namespace

TEST(LpBallVolume, ClosedFormCases) {
    EXPECT_NEAR(lp_unit_ball_volume(LpExponent::finite(2), 2), std::numbers::pi, 1e-13);
    EXPECT_NEAR(lp_unit_ball_volume(LpExponent::infinity(), 5), 32.0, 1e-12);
    EXPECT_NEAR(lp_unit_ball_volume(LpExponent::finite(1), 2), 2.0, 1e-13);
    // cross-polytope 2^d/d!
    EXPECT_NEAR(lp_unit_ball_volume(LpExponent::finite(1), 6), 64.0 / 720.0, 1e-14);
    // 4/3 pi
    EXPECT_NEAR(lp_unit_ball_volume(LpExponent::finite(2), 3), 4.0 * std::numbers::pi / 3.0, 1e-13);
}

TEST(LpBallVolume, LargePAppoachesCube) {
    EXPECT_NEAR(log_lp_unit_ball_volume(LpExponent::finite(1e6), 10), 10 * std::log(2.0), 1e-4);
}

TEST(LpExponent, Parse) {
    EXPECT_TRUE(LpExponent::parse("inf").is_infinite());
    EXPECT_DOUBLE_EQ(LpExponent::parse("2.5").value(), 2.5);
    EXPECT_THROW(LpExponent::parse("0.5"), DomainError);
    EXPECT_THROW(LpExponent::parse("abc"), DomainError);
}

TEST(NormalizedRadius, SpecialValues) {
    EXPECT_DOUBLE_EQ(lp_normalized_radius(LpExponent::infinity(), 9).value, 1.5);
    EXPECT_NEAR(lp_normalized_radius(LpExponent::finite(2), 1).value, 0.5, 1e-14);
    const double limit = 1.0 / std::sqrt(2.0 * std::numbers::pi * std::numbers::e);
    EXPECT_NEAR(lp_normalized_radius(LpExponent::finite(2), 200).ratio, limit, 0.01);
}

TEST(NormalizedRadius, FarthestPointOracle) {
    // Volume-one scale s = V_p(d)^{-1/d}; the farthest point from the origin is
    // a vertex s e_1 for p < 2 and s d^{-1/p} (1,...,1) for p >= 2.
    for (double p : {1.0, 1.5, 2.0, 3.0, 7.0}) {
        for (std::size_t d : {2u, 5u, 30u}) {
            const double vol = std::pow(2.0 * std::tgamma(1.0 + 1.0 / p), d) / std::tgamma(1.0 + d / p);
            const double s = std::pow(vol, -1.0 / d);
            const double far = p < 2.0 ? s : s * std::pow(static_cast<double>(d), 0.5 - 1.0 / p);
            EXPECT_NEAR(lp_normalized_radius(LpExponent::finite(p), d).value, far, 1e-12 * far) << p << " " << d;
        }
    }
}

TEST(RadiusLimit, Values) {
    EXPECT_TRUE(std::isinf(radius_limit_ratio(LpExponent::finite(1.5))));
    EXPECT_NEAR(radius_limit_ratio(LpExponent::finite(2)), 1.0 / std::sqrt(2.0 * std::numbers::pi * std::numbers::e),
                1e-14);
    EXPECT_DOUBLE_EQ(radius_limit_ratio(LpExponent::infinity()), 0.5);
    // the finite-d ratio converges to the limit
    const double lim = radius_limit_ratio(LpExponent::finite(4));
    EXPECT_NEAR(lp_normalized_radius(LpExponent::finite(4), 20000).ratio, lim, 2e-3);
}

TEST(PStar, RootAndBracket) {
    const double ps = solve_p_star(1e-10);
    EXPECT_NEAR(ps, 170.5186, 0.01);
    EXPECT_LT(std::abs(p_star_residual(ps)), 1e-8);
    const double lhs2 = 2.0 * std::sqrt(2.0 * std::numbers::e) * std::tgamma(1.5);
    const double rhs = std::sqrt(std::numbers::pi * std::numbers::e / 2.0);
    EXPECT_NEAR(p_star_residual(2.0), lhs2 - rhs, 1e-12);
    EXPECT_GT(p_star_residual(2.0), 0.0);
    EXPECT_LT(p_star_residual(1000.0), 0.0);
}

TEST(BallVolumeBounds, Examples) {
    EXPECT_NEAR(ball_volume_bounds(2, 1.0 / std::sqrt(2.0)).exact(), std::numbers::pi, 1e-12);
    const auto b1 = ball_volume_bounds(1, 1.0);
    EXPECT_NEAR(b1.exact(), 2.0, 1e-13);
    EXPECT_NEAR(b1.crude(), std::sqrt(2.0 * std::numbers::pi * std::numbers::e), 1e-12);
    for (std::size_t d : {1u, 10u, 100u, 1000u}) {
        const auto b = ball_volume_bounds(d, 0.1);
        EXPECT_LT(b.log_exact, b.log_crude) << d;
        EXPECT_LT(b.log_exact, b.log_refined) << d;
    }
}

TEST(DomainSpec, CubeBasics) {
    const auto cube = DomainSpec::cube(4);
    EXPECT_DOUBLE_EQ(cube.radius(), 1.0);
    EXPECT_DOUBLE_EQ(cube.radius_ratio(), 0.5);
    EXPECT_EQ(cube.center(), std::vector<double>(4, 0.5));
    EXPECT_TRUE(cube.contains(std::vector<double>{0, 1, 0.5, 0.2}));
    EXPECT_FALSE(cube.contains(std::vector<double>{0, 1.01, 0.5, 0.2}));
    EXPECT_THROW(cube.contains(std::vector<double>{0.5}), DomainError);
    EXPECT_EQ(DomainSpec::parse("cube", 3).kind(), DomainKind::cube);
    EXPECT_THROW(DomainSpec::parse("sphere", 3), DomainError);
}

TEST(DomainSpec, SamplesStayInsideAndAreUniform) {
    // Uniformity check: a fraction 2^{-1} of the volume lies in the ball
    // scaled by 2^{-1/d}.
    for (const char* text : {"cube", "lp:1", "lp:2", "lp:3.5", "lp:inf"}) {
        const std::size_t d = 6;
        const auto dom = DomainSpec::parse(text, d);
        Sampler rng(11, 0);
        std::vector<double> x(d);
        const int trials = 40000;
        int inner = 0;
        double max_dist = 0.0;
        for (int i = 0; i < trials; ++i) {
            dom.sample(rng, x);
            ASSERT_TRUE(dom.contains(x, 1e-12)) << text;
            double dist2 = 0.0;
            for (std::size_t t = 0; t < d; ++t) dist2 += (x[t] - dom.center()[t]) * (x[t] - dom.center()[t]);
            max_dist = std::max(max_dist, std::sqrt(dist2));
            std::vector<double> y(d);
            for (std::size_t t = 0; t < d; ++t) y[t] = x[t] - dom.center()[t];
            const double half = std::pow(0.5, 1.0 / d);
            const bool in_scaled = dom.p().is_infinite()
                                       ? std::all_of(y.begin(), y.end(),
                                                     [&](double v) { return std::abs(v) <= 0.5 * half; })
                                       : lp_norm(y, dom.p().value()) <= dom.scale() * half;
            inner += in_scaled;
        }
        EXPECT_LE(max_dist, dom.radius() * (1 + 1e-12)) << text;
        EXPECT_NEAR(static_cast<double>(inner) / trials, 0.5, 0.01) << text;
    }
}
