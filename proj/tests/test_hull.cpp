// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "curse/errors.hpp"
#include "curse/hull.hpp"

using namespace curse;

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Minimum distance over a grid of convex weights for three points.
double grid_distance(const PointSet& ps, std::span<const double> x, int steps) {
    double best = INFINITY;
    std::vector<double> y(ps.dim());
    for (int a = 0; a <= steps; ++a) {
        for (int b = 0; a + b <= steps; ++b) {
            const double w[3] = {static_cast<double>(a) / steps, static_cast<double>(b) / steps,
                                 static_cast<double>(steps - a - b) / steps};
            for (std::size_t t = 0; t < ps.dim(); ++t) {
                y[t] = w[0] * ps.point(0)[t] + w[1] * ps.point(1)[t] + w[2] * ps.point(2)[t];
            }
            best = std::min(best, dist(x, y));
        }
    }
    return best;
}

// First-order optimality: <x - y, p_i - y> <= tol for every point.
void expect_optimal(const PointSet& ps, std::span<const double> x, const HullProjection& h, double tol) {
    double wsum = 0.0;
    std::vector<double> rebuilt(ps.dim(), 0.0);
    for (const auto& aw : h.weights) {
        EXPECT_GE(aw.weight, -1e-12);
        wsum += aw.weight;
        for (std::size_t t = 0; t < ps.dim(); ++t) rebuilt[t] += aw.weight * ps.point(aw.index)[t];
    }
    EXPECT_NEAR(wsum, 1.0, 1e-9);
    EXPECT_LT(dist(rebuilt, h.nearest), 1e-8);
    EXPECT_NEAR(h.distance, dist(x, h.nearest), 1e-12);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double inner = 0.0;
        for (std::size_t t = 0; t < ps.dim(); ++t) {
            inner += (x[t] - h.nearest[t]) * (ps.point(i)[t] - h.nearest[t]);
        }
        EXPECT_LE(inner, tol) << i;
    }
}

}  // namespace

TEST(PointSet, DeduplicatesExactRows) {
    const auto ps = PointSet::from_rows({{0, 0}, {1, 0}, {0, 0}, {1, 0}, {0, 1}});
    EXPECT_EQ(ps.size(), 3u);
}

TEST(PointSet, CsvRoundTrip) {
    const auto ps = PointSet::sample(DomainSpec::cube(3), 5, 9);
    std::stringstream ss;
    ps.write_csv(ss);
    const auto back = PointSet::read_csv(ss);
    ASSERT_EQ(back.size(), ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(back.point(i)[t], ps.point(i)[t]);
    }
}

TEST(PointSet, SampleIsSeeded) {
    const auto a = PointSet::sample(DomainSpec::cube(4), 6, 1);
    const auto b = PointSet::sample(DomainSpec::cube(4), 6, 1);
    const auto c = PointSet::sample(DomainSpec::cube(4), 6, 2);
    EXPECT_EQ(std::vector<double>(a.coordinates().begin(), a.coordinates().end()),
              std::vector<double>(b.coordinates().begin(), b.coordinates().end()));
    EXPECT_NE(a.point(0)[0], c.point(0)[0]);
}

TEST(Projection, Examples) {
    const auto seg = PointSet::from_rows({{0, -1}, {0, 1}});
    const std::vector<double> x{2, 0};
    const auto h = project_onto_hull(x, seg);
    EXPECT_NEAR(h.distance, 2.0, 1e-12);
    EXPECT_NEAR(h.nearest[0], 0.0, 1e-12);
    EXPECT_NEAR(h.nearest[1], 0.0, 1e-12);

    const auto tri = PointSet::from_rows({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    EXPECT_EQ(project_onto_hull(tri.point(1), tri).distance, 0.0);
    const std::vector<double> mean{1.0 / 3, 1.0 / 3, 0};
    EXPECT_LT(project_onto_hull(mean, tri).distance, 1e-12);
}

TEST(Projection, MatchesGridOracle) {
    Sampler rng(3, 0);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::vector<double>> rows(3, std::vector<double>(2));
        for (auto& r : rows)
            for (auto& v : r) v = rng.uniform();
        const auto ps = PointSet::from_rows(rows);
        if (ps.size() < 3) continue;
        const std::vector<double> x{2.0 * rng.uniform() - 0.5, 2.0 * rng.uniform() - 0.5};
        const double oracle = grid_distance(ps, x, 600);
        const double got = project_onto_hull(x, ps).distance;
        EXPECT_LE(got, oracle + 1e-12);
        EXPECT_NEAR(got, oracle, 3e-3);
    }
}

TEST(Projection, OptimalityInHigherDimensions) {
    for (std::size_t d : {3u, 10u, 40u}) {
        for (std::size_t n : {2u, 8u, 64u}) {
            const auto ps = PointSet::sample(DomainSpec::cube(d), n, 100 + d + n);
            WolfeSolver solver(ps);
            Sampler rng(d * n, 1);
            std::vector<double> x(d);
            for (int q = 0; q < 10; ++q) {
                for (auto& v : x) v = 3.0 * rng.uniform() - 1.0;
                const auto h = solver.project(x);
                expect_optimal(ps, x, h, 1e-8 * (1.0 + h.distance));
            }
        }
    }
}

TEST(Projection, DegenerateAndAffinelyDependentInputs) {
    // collinear points and repeated directions
    const auto ps = PointSet::from_rows({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {0.5, 0.5, 0.5}, {3, 3, 3}});
    const std::vector<double> x{1, 2, 3};
    const auto h = project_onto_hull(x, ps);
    expect_optimal(ps, x, h, 1e-9);
    EXPECT_NEAR(h.distance, std::sqrt(2.0), 1e-9);
}

TEST(Projection, WithinAgreesWithDistance) {
    const auto ps = PointSet::sample(DomainSpec::cube(12), 20, 5);
    WolfeSolver solver(ps);
    Sampler rng(8, 0);
    std::vector<double> x(12);
    for (int q = 0; q < 200; ++q) {
        for (auto& v : x) v = rng.uniform();
        const double dd = solver.distance(x);
        for (double r : {0.5 * dd, 0.99 * dd, 1.01 * dd, 2.0 * dd}) {
            EXPECT_EQ(solver.within(x, r), dd <= r) << dd << " " << r;
        }
    }
}

TEST(Projection, IterationLimitIsReported) {
    const auto ps = PointSet::sample(DomainSpec::cube(20), 50, 5);
    ProjectionOptions opts;
    opts.max_iterations = 1;
    WolfeSolver solver(ps, opts);
    std::vector<double> x(20, 2.0);
    x[0] = -3.0;
    EXPECT_THROW(solver.project(x), IterationLimitError);
}

TEST(Projection, ConcurrentSolversShareOnePointSet) {
    const auto ps = PointSet::sample(DomainSpec::cube(15), 30, 6);
    std::vector<double> x(15, 1.5);
    const double expected = WolfeSolver(PointSet::sample(DomainSpec::cube(15), 30, 6)).distance(x);
    std::vector<double> got(4);
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            WolfeSolver s(ps);
            got[t] = s.distance(x);
        });
    }
    for (auto& th : pool) th.join();
    for (double g : got) EXPECT_EQ(g, expected);
}

TEST(Neighborhood, DistanceExamples) {
    const auto ps = PointSet::from_rows({{0.3}, {0.5}});
    EXPECT_NEAR(dist_to_neighborhood(std::vector<double>{0.7}, ps, 0.1), 0.1, 1e-14);
    EXPECT_EQ(dist_to_neighborhood(ps.point(0), ps, 0.1), 0.0);
    const auto cube_ps = PointSet::sample(DomainSpec::cube(9), 3, 2);
    std::vector<double> far(9, 5.0);
    const double full = project_onto_hull(far, cube_ps).distance;
    const double delta = full / (3.0 * 3.0);  // dist = 3 delta sqrt(d)
    EXPECT_NEAR(dist_to_neighborhood(far, cube_ps, delta), 2.0 * delta * 3.0, 1e-12);
}

TEST(Neighborhood, ProjectionExamples) {
    const auto ps = PointSet::from_rows({{0.0}});
    const auto y = project_onto_neighborhood(std::vector<double>{3.0}, ps, 1.0);
    EXPECT_NEAR(y[0], 1.0, 1e-14);
    const std::vector<double> inside{0.5};
    EXPECT_EQ(project_onto_neighborhood(inside, ps, 1.0), inside);

    const auto cps = PointSet::sample(DomainSpec::cube(6), 5, 3);
    std::vector<double> x(6, 1.7);
    const auto p = project_onto_neighborhood(x, cps, 0.05);
    EXPECT_NEAR(dist(x, p), dist_to_neighborhood(x, cps, 0.05), 1e-10);
}

TEST(Elekes, Examples) {
    const std::vector<double> z{0.0};
    EXPECT_TRUE(elekes_cover_check(PointSet::from_rows({{-1}, {1}}), z, 1.0, 1000, 1));
    EXPECT_TRUE(elekes_cover_check(PointSet::from_rows({{0.7}}), z, 1.0, 100, 1));
    const auto dom = DomainSpec::lp_ball(LpExponent::finite(2), 10);
    const auto ps = PointSet::sample(dom, 40, 4);
    EXPECT_TRUE(elekes_cover_check(ps, dom.center(), dom.radius(), 10000, 2));
    EXPECT_THROW(elekes_cover_check(ps, dom.center(), 0.1 * dom.radius(), 10, 2), PreconditionError);
}
