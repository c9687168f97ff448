// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "curse/parallel.hpp"
#include "curse/rng.hpp"

using curse::Philox;
using curse::Sampler;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerVectors) {
    struct Kat {
        Philox::Block ctr;
        Philox::Key key;
        Philox::Block expected;
    };
    const Kat kats[] = {
        {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}},
        {{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
         {0xffffffff, 0xffffffff},
         {0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}},
        {{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
         {0xa4093822, 0x299f31d0},
         {0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}},
    };
    for (const auto& k : kats) EXPECT_EQ(Philox::bijection(k.ctr, k.key), k.expected);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    Philox a(42, 7), b(42, 7), c(42, 8), e(43, 7);
    int same_c = 0, same_e = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        same_c += x == c();
        same_e += x == e();
    }
    EXPECT_EQ(same_c, 0);
    EXPECT_EQ(same_e, 0);
}

TEST(Sampler, UniformMoments) {
    Sampler s(1, 0);
    curse::RunningStats st;
    for (int i = 0; i < 200000; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        st.push(u);
    }
    EXPECT_NEAR(st.mean, 0.5, 0.005);
    EXPECT_NEAR(st.sample_variance(), 1.0 / 12.0, 0.002);
}

TEST(Sampler, NormalMoments) {
    Sampler s(2, 0);
    curse::RunningStats st;
    for (int i = 0; i < 200000; ++i) st.push(s.normal());
    EXPECT_NEAR(st.mean, 0.0, 0.01);
    EXPECT_NEAR(st.sample_variance(), 1.0, 0.02);
}

TEST(Sampler, GammaMean) {
    for (double shape : {0.5, 1.0, 2.5}) {
        Sampler s(3, 0);
        curse::RunningStats st;
        for (int i = 0; i < 100000; ++i) st.push(s.gamma(shape));
        EXPECT_NEAR(st.mean, shape, 0.03 * shape + 0.01) << shape;
    }
}

TEST(Sampler, BallRadiusDistribution) {
    // P(|U| <= r/2) = 2^{-d} for U uniform in the d-ball of radius r.
    const std::size_t d = 3;
    Sampler s(4, 0);
    std::vector<double> v(d);
    int inner = 0;
    const int trials = 80000;
    for (int i = 0; i < trials; ++i) {
        s.ball(v, 2.0);
        const double r = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        ASSERT_LE(r, 2.0);
        inner += r <= 1.0;
    }
    EXPECT_NEAR(static_cast<double>(inner) / trials, 0.125, 0.005);
}

TEST(Sampler, SimplexWeights) {
    Sampler s(5, 0);
    std::vector<double> w(6);
    for (int i = 0; i < 100; ++i) {
        s.simplex(w);
        EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
        for (double x : w) EXPECT_GT(x, 0.0);
    }
}

TEST(RunningStats, MergeMatchesSequential) {
    Sampler s(6, 0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = s.normal() * 3.0 + 1.0;
    curse::RunningStats all;
    for (double x : xs) all.push(x);
    std::vector<curse::RunningStats> parts(7);
    for (std::size_t i = 0; i < xs.size(); ++i) parts[i * 7 / xs.size()].push(xs[i]);
    const auto merged = curse::merge_pairwise(parts);
    EXPECT_EQ(merged.count, all.count);
    EXPECT_NEAR(merged.mean, all.mean, 1e-12);
    EXPECT_NEAR(merged.sample_variance(), all.sample_variance(), 1e-10);
}

TEST(MapChunks, ResultsIndependentOfThreadCount) {
    auto fn = [](std::size_t c) { return static_cast<double>(c * c); };
    const auto one = curse::map_chunks<double>(50, curse::ExecConfig{1}, fn);
    const auto four = curse::map_chunks<double>(50, curse::ExecConfig{4}, fn);
    EXPECT_EQ(one, four);
}

TEST(MapChunks, RethrowsWorkerException) {
    auto fn = [](std::size_t c) -> int {
        if (c == 3) throw std::runtime_error("boom");
        return 0;
    };
    EXPECT_THROW(curse::map_chunks<int>(10, curse::ExecConfig{2}, fn), std::runtime_error);
}
