// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "curse/bounds.hpp"
#include "curse/errors.hpp"

using namespace curse;

namespace {

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;

void expect_rel(double got, double expected, double tol = 1e-12) {
    EXPECT_NEAR(got, expected, tol * std::max(1.0, std::abs(expected)));
}

double witness(const Verdict& v, const std::string& key) {
    for (const auto& [k, x] : v.witness)
        if (k == key) return x;
    ADD_FAILURE() << "missing witness key " << key;
    return NAN;
}

bool implies(const Verdict& v, VerdictKind k) {
    return std::find(v.implied.begin(), v.implied.end(), k) != v.implied.end();
}

}  // namespace

TEST(LipschitzRule, LogValueFormula) {
    const auto r = LipschitzRule::parse("c=0.5,a=1.25,q=1.5,off=1,r=0.75,s=0.5");
    for (std::size_t j : {1u, 3u, 6u}) {
        for (std::size_t d : {1u, 10u, 1000u}) {
            const double expected = 0.5 + j * 1.25 + 1.5 * std::lgamma(j + 1.0 - 1.0) - (0.75 + 0.5 * j) * std::log(d);
            expect_rel(r.log_value(j, d), expected);
        }
    }
    const auto back = LipschitzRule::parse(r.to_string());
    expect_rel(back.log_value(4, 17), r.log_value(4, 17));
}

TEST(SmoothnessProfile, ParseAndLookup) {
    const auto p = SmoothnessProfile::parse("k=2;L0=c=0,r=0.5;L1=r=1;L2=r=1.2");
    EXPECT_EQ(p.k(), 2u);
    EXPECT_FALSE(p.is_infinite());
    expect_rel(p.log_L(2, 100), -1.2 * std::log(100.0));
    const auto q = SmoothnessProfile::parse("k=inf;tail=c=1,q=1");
    EXPECT_TRUE(q.is_infinite());
    EXPECT_FALSE(q.k());
    expect_rel(q.log_L(5, 3), 1.0 + std::lgamma(6.0));
    EXPECT_THROW(SmoothnessProfile::parse("k=2;L0=r=1"), std::invalid_argument);
    const auto round = SmoothnessProfile::parse(p.to_string());
    expect_rel(round.log_L(1, 9), p.log_L(1, 9));
}

TEST(SmoothnessProfile, PartialToDirectionalLosesHalfPowerPerOrder) {
    const auto p = SmoothnessProfile::parse("k=2;kind=partial;L0=r=1;L1=r=1;L2=r=1");
    const auto dir = p.to_directional();
    EXPECT_EQ(dir.kind(), DerivativeKind::directional);
    for (std::size_t j = 0; j <= 2; ++j) expect_rel(dir.log_L(j, 64), p.log_L(j, 64) + 0.5 * j * std::log(64.0));
}

TEST(Bounds, LipschitzLower) {
    const double unit = 3.0 * std::sqrt(2.0 * kE * kPi);
    const double d = 25;
    expect_rel(lb_lipschitz(0.3, 25, unit / std::sqrt(d), 1.0).log_value, std::log(0.7));
    expect_rel(lb_lipschitz(0.5, 25, 2.0 * unit / std::sqrt(d), 1.0).value(), 0.5 * std::pow(2.0, 25));
    const auto bad = lb_lipschitz(0.6, 10, 1.0, 2.0);
    EXPECT_FALSE(bad.preconditions_met);
    EXPECT_EQ(bad.direction, Direction::lower);
}

TEST(Bounds, GradientCubeLower) {
    expect_rel(lb_lipgrad_cube(0.5, 7).value(), 0.5 / 8.0 * std::pow(8.0 / 7.0, 7));
    expect_rel(lb_lipgrad_cube(0.0, 12).value(), std::pow(8.0 / 7.0, 12) / 13.0);
    EXPECT_LT(lb_lipgrad_cube(1.0 - 1e-15, 5).log_value, -30.0);
    // log-domain: no overflow at d = 10^4
    EXPECT_TRUE(std::isfinite(lb_lipgrad_cube(0.5, 10000).log_value));
}

TEST(Bounds, HigherLower) {
    expect_rel(lb_higher(0.9, 100, 1.01).value(), 0.1 * std::pow(1.01, 100));
    EXPECT_NEAR(lb_higher(0.9, 100, 1.01).value(), 0.2705, 1e-4);
    EXPECT_FALSE(lb_higher(0.5, 10, 1.0).preconditions_met);
    // same as the cube case up to the (d + 1) factor
    expect_rel(lb_higher(0.5, 9, 8.0 / 7.0).log_value - std::log(10.0), lb_lipgrad_cube(0.5, 9).log_value);
}

TEST(Bounds, OnePointUpper) {
    expect_rel(ub_one_point_c0(0.2, 16, 0.5, 0.0).value(), 0.5 * 0.2 * 4.0);
    expect_rel(ub_one_point_c0(0.0, 16, 0.5, 0.125).value(), 0.25);
    expect_rel(ub_one_point_c1(0.01 / 9.0, 3.0).value(), 0.01);
    expect_rel(ub_one_point_c1(0.3, std::sqrt(12.0)).value(), 0.3 * 12.0);
    EXPECT_EQ(ub_one_point_c1(0.0, 2.0).value(), 0.0);
    expect_rel(ub_one_point_c1(0.3, 1.0, std::make_pair(0.5, 0.01), 12).value(), 0.25 * 0.3 * 12 + 0.02);
}

TEST(Bounds, TaylorUpper) {
    expect_rel(ub_taylor(0, 0.4, 9, 0.5).value(), ub_one_point_c0(0.4, 9, 0.5, 0.0).value());
    for (std::size_t d : {1u, 7u, 300u}) {
        expect_rel(ub_taylor(2, 96.0 / std::pow(static_cast<double>(d), 1.5), d, 0.5).value(), 6.0);
    }
    EXPECT_EQ(ub_taylor(3, 0.0, 5, 0.5).value(), 0.0);
}

TEST(Bounds, QuasiPolynomial) {
    const auto r = qpt_bound(std::exp(-3.0), 10, 1.0, kE);
    ASSERT_EQ(r.extras.size(), 2u);
    EXPECT_EQ(r.extras[0].second, 3.0);
    expect_rel(r.log_value, 3.0 * (1.0 + std::log(10.0)));
    const auto trivial = qpt_bound(0.5, 10, 0.25, 2.0);
    EXPECT_EQ(trivial.extras[0].second, 0.0);
    double prev = -INFINITY;
    for (std::size_t d : {1u, 2u, 10u, 100u}) {
        const double env = qpt_bound(0.01, d, 2.0, 3.0).extras[1].second;
        EXPECT_GT(env, prev);
        prev = env;
    }
}

TEST(Bounds, UnitBoundTaylor) {
    const double expected = (1.0 + std::log(9.0)) * std::max(std::exp(2.0) * 1.5, std::log(1.5 / 0.01));
    expect_rel(cor64_bound(0.01, 9, 1.5).log_value, expected);
    // the logarithmic branch takes over as eps -> 0
    const auto tiny = cor64_bound(1e-300, 9, 1.5);
    expect_rel(tiny.log_value, (1.0 + std::log(9.0)) * std::log(1.5e300));
    // continuity where both branches agree
    const double rad = 0.5;
    const double eps = rad * std::exp(-std::exp(2.0) * rad);
    expect_rel(cor64_bound(eps, 4, rad).log_value, (1.0 + std::log(4.0)) * std::exp(2.0) * rad, 1e-10);
}

TEST(Bounds, NotUwtWitness) {
    // direct evaluation of (d - 1) ln 2 / (d^alpha + 2^alpha d^{alpha m}) at large d
    const double d = 1e9;
    const double direct = (d - 1.0) * std::log(2.0) / (d + 2.0 * d);
    const auto r = not_uwt_witness(1.0, 3, 1.0);
    EXPECT_TRUE(r.preconditions_met);
    EXPECT_NEAR(r.value(), direct, 1e-8);
    EXPECT_FALSE(not_uwt_witness(2.0, 3, 1.0).preconditions_met);
    EXPECT_FALSE(not_uwt_witness(1.0, std::nullopt, 1.0).preconditions_met);
}

TEST(Classify, LipschitzCurseOnConvexP) {
    const auto v = classify(SmoothnessProfile::parse("k=0;L0=c=0,r=0.5"), DomainFamily::convex_P);
    EXPECT_EQ(v.kind, VerdictKind::curse);
    EXPECT_EQ(v.theorem, "lipschitz_dichotomy");
    EXPECT_TRUE(implies(v, VerdictKind::not_UWT));
    expect_rel(witness(v, "eps0"), 1.0 / (2.0 * witness(v, "a")));
    EXPECT_FALSE(v.samples.empty());
    for (const auto& s : v.samples) EXPECT_EQ(s.direction, Direction::lower);
}

TEST(Classify, GradientNoCurseOnSmallRadius) {
    const auto v = classify(SmoothnessProfile::parse("k=1;L0=r=0.5;L1=r=1.5"), DomainFamily::small_radius);
    EXPECT_EQ(v.kind, VerdictKind::no_curse);
}

TEST(Classify, UnitProfileOnCubeIsWeaklyTractable) {
    const auto v = classify(SmoothnessProfile::parse("k=inf;tail=c=0"), DomainFamily::cube);
    EXPECT_EQ(v.kind, VerdictKind::WT);
}

TEST(Classify, SecondOrderGapIsIndeterminate) {
    const auto p = SmoothnessProfile::parse("k=2;L0=r=0.5;L1=r=1;L2=r=1.2");
    EXPECT_EQ(classify(p, DomainFamily::cube).kind, VerdictKind::indeterminate_gap);
    EXPECT_THROW(classify(p, DomainFamily::convex), UnsupportedCombination);
}

TEST(Classify, ComplementaryHypothesesGetComplementaryVerdicts) {
    // limsup L_0 sqrt(d) > 0 versus = 0
    for (auto fam : {DomainFamily::convex_P, DomainFamily::small_radius, DomainFamily::cube}) {
        EXPECT_EQ(classify(SmoothnessProfile::parse("k=0;L0=c=-3,r=0.5"), fam).kind, VerdictKind::curse);
        EXPECT_EQ(classify(SmoothnessProfile::parse("k=0;L0=c=-3,r=0.6"), fam).kind, VerdictKind::no_curse);
    }
    // k = 1: limsup L_1 d > 0 versus L_1 = o(1/d), with L_0 at the critical rate
    for (auto fam : {DomainFamily::small_radius, DomainFamily::cube}) {
        EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;L0=r=0.5;L1=r=1"), fam).kind, VerdictKind::curse);
        EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;L0=r=0.5;L1=r=1.1"), fam).kind, VerdictKind::no_curse);
        EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;L0=r=0.6;L1=r=1"), fam).kind, VerdictKind::no_curse);
    }
}

TEST(Classify, ScalingNeverRemovesACurse) {
    const char* profiles[] = {"k=0;L0=r=0.5", "k=1;L0=r=0.5;L1=r=1", "k=1;L0=r=0;L1=r=0.5"};
    for (const char* text : profiles) {
        const auto p = SmoothnessProfile::parse(text);
        ASSERT_EQ(classify(p, DomainFamily::cube).kind, VerdictKind::curse) << text;
        for (double a : {1.0, 2.0, 1e6}) {
            EXPECT_EQ(classify(p.scaled(std::log(a)), DomainFamily::cube).kind, VerdictKind::curse) << text << a;
        }
    }
}

TEST(Classify, PartialProfilesAreEmbedded) {
    // curse conditions read the partial bounds directly; the no-curse
    // threshold becomes L_j d^{j+1/2} -> 0
    const auto cube = DomainFamily::cube;
    EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;kind=partial;L0=r=0.5;L1=r=1"), cube).kind,
              VerdictKind::curse);
    EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;kind=partial;L0=r=0.5;L1=r=1.5"), cube).kind,
              VerdictKind::indeterminate_gap);
    EXPECT_EQ(classify(SmoothnessProfile::parse("k=1;kind=partial;L0=r=0.5;L1=r=1.6"), cube).kind,
              VerdictKind::no_curse);
}

TEST(Classify, InfiniteOrderBranches) {
    // factorial growth faster than j! on small families: curse
    EXPECT_EQ(classify(SmoothnessProfile::parse("k=inf;L0=r=0.5;tail=q=2,r=1"), DomainFamily::cube).kind,
              VerdictKind::curse);
    // geometric bounds with fast decay: quasi-polynomial
    const auto qpt = classify(SmoothnessProfile::parse("k=inf;tail=c=0,q=0,r=0.5,s=0.5"), DomainFamily::cube);
    EXPECT_EQ(qpt.kind, VerdictKind::QPT);
}
