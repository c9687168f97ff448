// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "curse/errors.hpp"
#include "curse/quadrature.hpp"

using namespace curse;

namespace {

// Integral of sin(<a,x> + b) over [0,1]^d as an alternating sum over the
// cube vertices: sum_v (-1)^{d-|v|} sin(<a,v> + b - d pi/2) / prod a_i.
double vertex_sum_sine(const std::vector<double>& a, double b) {
    const std::size_t d = a.size();
    double prod = 1.0;
    for (double v : a) prod *= v;
    double total = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        double phase = b - static_cast<double>(d) * std::numbers::pi / 2.0;
        int ones = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask >> i & 1) {
                phase += a[i];
                ++ones;
            }
        }
        total += ((d - ones) % 2 ? -1.0 : 1.0) * std::sin(phase);
    }
    return total / prod;
}

Integrand plain(std::function<double(std::span<const double>)> f) {
    Integrand g;
    g.eval = std::move(f);
    return g;
}

}  // namespace

TEST(CubeMoment, Examples) {
    EXPECT_DOUBLE_EQ(cube_moment(0), 1.0);
    EXPECT_DOUBLE_EQ(cube_moment(1), 0.0);
    EXPECT_DOUBLE_EQ(cube_moment(2), 1.0 / 12.0);
    EXPECT_DOUBLE_EQ(cube_moment(4), 1.0 / 80.0);
}

TEST(SineRidge, ExactIntegralMatchesVertexSum) {
    Sampler rng(12, 0);
    for (std::size_t d : {1u, 2u, 4u, 8u}) {
        std::vector<double> a(d);
        for (auto& v : a) v = 4.0 * rng.uniform() - 2.0;
        const double b = 6.0 * rng.uniform();
        const auto f = sine_ridge(a, b, 0.1);
        ASSERT_TRUE(f.exact_integral);
        EXPECT_NEAR(*f.exact_integral, 0.1 * vertex_sum_sine(a, b), 1e-12) << d;
    }
}

TEST(SineRidge, PartialsMatchFiniteDifferences) {
    const std::vector<double> a{0.7, -1.3, 0.4};
    const auto f = sine_ridge(a, 0.3, 0.1);
    const std::vector<double> x{0.4, 0.5, 0.6};
    for (const MultiIndex& beta : {MultiIndex{1, 0, 0}, MultiIndex{0, 2, 0}, MultiIndex{1, 1, 1}, MultiIndex{2, 0, 2}}) {
        Integrand fd_only = plain(f.eval);
        const double fd = fd_partial(fd_only, x, beta, 1e-3);
        EXPECT_NEAR(f.analytic_partial(x, beta), fd, 1e-5) << beta[0] << beta[1] << beta[2];
    }
    const auto g = f.analytic_gradient(x);
    EXPECT_NEAR(g[1], f.analytic_partial(x, MultiIndex{0, 1, 0}), 1e-15);
}

TEST(FdPartial, Examples) {
    const std::vector<double> x{0.3, 0.6, 0.5};
    const auto constant = plain([](std::span<const double>) { return 4.2; });
    EXPECT_EQ(fd_partial(constant, x, MultiIndex{1, 0, 0}, 1e-3), 0.0);
    EXPECT_EQ(fd_partial(constant, x, MultiIndex{2, 2, 0}, 1e-3), 0.0);
    const auto product = plain([](std::span<const double> y) { return y[0] * y[1] * y[2]; });
    EXPECT_NEAR(fd_partial(product, x, MultiIndex{1, 1, 1}, 1e-2), 1.0, 1e-10);
    const auto square = plain([](std::span<const double> y) { return y[0] * y[0]; });
    EXPECT_NEAR(fd_partial(square, x, MultiIndex{2, 0, 0}, 1e-3), 2.0, 1e-6);
}

TEST(FdPartial, StencilMustStayInDomain) {
    const auto cube = DomainSpec::cube(2);
    const auto f = plain([](std::span<const double> y) { return y[0]; });
    const std::vector<double> corner{0.0005, 0.5};
    try {
        fd_partial(f, corner, MultiIndex{2, 0}, 1e-3, &cube);
        FAIL() << "expected StencilOutsideDomain";
    } catch (const StencilOutsideDomain& e) {
        EXPECT_EQ(e.coordinate(), 0u);
    }
    EXPECT_NO_THROW(fd_partial(f, corner, MultiIndex{0, 2}, 1e-3, &cube));
}

TEST(FdStencil, NodeCount) {
    const std::vector<double> x{0.5, 0.5, 0.5};
    EXPECT_EQ(fd_stencil(x, MultiIndex{2, 0, 0}, 1e-3).size(), 3u);
    EXPECT_EQ(fd_stencil(x, MultiIndex{2, 2, 0}, 1e-3).size(), 9u);
    EXPECT_EQ(fd_stencil(x, MultiIndex{0, 0, 0}, 1e-3).size(), 1u);
}

TEST(MultiIndices, EvenOnlyAndCounts) {
    const auto idx = even_multi_indices(10, 3);
    EXPECT_EQ(idx.size(), 11u);
    for (const auto& b : idx)
        for (unsigned v : b) EXPECT_EQ(v % 2, 0u);
    // all multi-indices: C(13, 3) = 286 <= e^3 10^3
    EXPECT_LE(286.0, std::exp(3.0) * 1000.0);
    EXPECT_EQ(even_multi_indices(3, 4).size(), 1u + 3u + 3u + 3u);
}

TEST(OnePoint, Examples) {
    const auto cube = DomainSpec::cube(5);
    const auto constant = plain([](std::span<const double>) { return 2.5; });
    const auto q = quad_one_point(constant, cube);
    EXPECT_EQ(q.value, 2.5);
    EXPECT_EQ(q.evaluations_used, 1u);
    const auto affine = plain([](std::span<const double> y) {
        double s = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += (i + 1.0) * y[i];
        return s;
    });
    EXPECT_NEAR(quad_one_point(affine, cube).value, 1.0 + 0.5 * 15.0, 1e-14);
}

TEST(Taylor, OrderZeroIsOnePoint) {
    const auto f = sine_ridge({0.5, 1.0, -0.25}, 0.2, 0.1);
    const auto cube = DomainSpec::cube(3);
    EXPECT_EQ(quad_taylor(f, cube, 0).value, quad_one_point(f, cube).value);
}

TEST(Taylor, ExactOnPolynomials) {
    // 1 + x1^2 + x1 x2 + x3^2 x4^2, degree 4
    Integrand f;
    f.eval = [](std::span<const double> x) { return 1 + x[0] * x[0] + x[0] * x[1] + x[2] * x[2] * x[3] * x[3]; };
    f.analytic_partial = [](std::span<const double> x, const MultiIndex& b) {
        auto mono = [&](std::array<unsigned, 4> e) {
            double v = 1.0;
            for (int i = 0; i < 4; ++i) {
                if (b[i] > e[i]) return 0.0;
                for (unsigned k = 0; k < b[i]; ++k) v *= e[i] - k;
                v *= std::pow(x[i], e[i] - b[i]);
            }
            return v;
        };
        return mono({0, 0, 0, 0}) + mono({2, 0, 0, 0}) + mono({1, 1, 0, 0}) + mono({0, 0, 2, 2});
    };
    const double exact = 1.0 + 1.0 / 3.0 + 0.25 + 1.0 / 9.0;
    const auto q = quad_taylor(f, DomainSpec::cube(4), 4);
    EXPECT_NEAR(q.value, exact, 1e-10);
    EXPECT_EQ(q.evaluations_used, even_multi_indices(4, 4).size());
}

TEST(Taylor, EvaluationCountsWithFiniteDifferences) {
    const std::size_t d = 6;
    auto f = sine_ridge(std::vector<double>(d, 0.5), 0.1, 0.1);
    f.analytic_partial = nullptr;
    f.analytic_gradient = nullptr;
    const auto cube = DomainSpec::cube(d);
    EXPECT_EQ(quad_taylor(f, cube, 1).evaluations_used, 1u);
    EXPECT_EQ(quad_taylor(f, cube, 2).evaluations_used, 2 * d + 1);
    EXPECT_EQ(quad_taylor(f, cube, 3).evaluations_used, 2 * d + 1);
    // order 4 adds, at its own step h4: +-h4, +-2h4 on each axis, and the four
    // diagonal nodes of each pair 2 e_i + 2 e_k
    const auto q4 = quad_taylor(f, cube, 4);
    EXPECT_EQ(q4.evaluations_used, 1 + 2 * d + 4 * d + 4 * d * (d - 1) / 2);
}

TEST(Taylor, FiniteDifferenceResultIndependentOfThreads) {
    auto f = sine_ridge({0.5, -0.4, 0.3, 0.9, -1.1}, 0.7, 0.1);
    f.analytic_partial = nullptr;
    const auto cube = DomainSpec::cube(5);
    const auto one = quad_taylor(f, cube, 4, std::nullopt, ExecConfig{1});
    const auto four = quad_taylor(f, cube, 4, std::nullopt, ExecConfig{4});
    EXPECT_EQ(one.value, four.value);
    EXPECT_EQ(one.evaluations_used, four.evaluations_used);
}

TEST(Taylor, RejectsNonCubeDomains) {
    const auto f = sine_ridge({0.5, 0.5}, 0.0, 0.1);
    EXPECT_THROW(quad_taylor(f, DomainSpec::lp_ball(LpExponent::finite(2), 2), 2), UnsupportedDomain);
}

TEST(Taylor, ErrorWithinDeclaredBound) {
    const std::vector<double> a{1.2, -0.7, 0.9, 0.4};
    const auto f = sine_ridge(a, 0.4, 0.1);
    const auto cube = DomainSpec::cube(4);
    for (unsigned j = 0; j <= 4; ++j) {
        const auto q = quad_taylor(f, cube, j);
        ASSERT_TRUE(q.error_bound);
        EXPECT_LE(std::abs(q.value - *f.exact_integral), *q.error_bound) << j;
    }
}

TEST(ReferenceIntegral, ConstantAndSine) {
    const auto cube = DomainSpec::cube(3);
    const auto c = reference_integral(plain([](std::span<const double>) { return 0.25; }), cube, 5000, 1);
    EXPECT_EQ(c.mean, 0.25);
    EXPECT_EQ(c.half_width_95, 0.0);
    const auto f = sine_ridge({1.0, 2.0, -0.5}, 0.3, 1.0);
    const auto mc = reference_integral(f, cube, 200000, 2);
    EXPECT_NEAR(mc.mean, *f.exact_integral, 3.0 * mc.half_width_95 / 1.96);
}

TEST(ReferenceIntegral, FoolingC1IsAtLeastOneMinusNeighborhood) {
    const std::size_t d = 3;
    const auto hull = PointSet::from_rows({{0.5, 0.5, 0.5}});
    const auto fool = FoolingFunction::c1(hull, 0.05);
    const auto f = fooling_integrand(fool);
    const auto mc = reference_integral(f, DomainSpec::cube(d), 100000, 3);
    // f = 1 outside the ball of radius 2 delta sqrt(d) and f >= 0
    const double r = 2.0 * 0.05 * std::sqrt(3.0);
    const double ball = 4.0 / 3.0 * std::numbers::pi * r * r * r;
    EXPECT_LE(mc.mean, 1.0);
    EXPECT_GE(mc.mean, 1.0 - ball - 3.0 * mc.half_width_95 / 1.96);
}
