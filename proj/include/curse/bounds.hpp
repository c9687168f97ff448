// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace curse {

enum class DerivativeKind { directional, partial };

/*!
 * Closed form for one order j of a Lipschitz profile:
 *
 *   ln L_{j,d} = log_constant + j log_geometric
 *              + factorial_power lnGamma(j + 1 - factorial_offset)
 *              - (rate + rate_slope j) ln d.
 *
 * The classifier only looks at these descriptors, never at sampled values.
 */
struct LipschitzRule {
    double log_constant = 0.0;
    double log_geometric = 0.0;
    double factorial_power = 0.0;
    double factorial_offset = 0.0;  // must be < j + 1 wherever the rule applies
    double rate = 0.0;
    double rate_slope = 0.0;

    double decay(std::size_t j) const noexcept { return rate + rate_slope * static_cast<double>(j); }
    // ln L_{j,d} + decay(j) ln d, the d-free part.
    double log_coefficient(std::size_t j) const;
    double log_value(std::size_t j, std::size_t d) const;

    // Parses "c=..,a=..,q=..,off=..,r=..,s=.." (all keys optional, default 0).
    static LipschitzRule parse(const std::string& text);
    std::string to_string() const;
};

/*!
 * Bounds L_{j,d} for j = 0..k (k possibly infinite). Orders beyond the
 * explicit rules use the tail rule; finite profiles have no tail.
 */
class SmoothnessProfile {
  public:
    static SmoothnessProfile finite(std::vector<LipschitzRule> rules,
                                    DerivativeKind kind = DerivativeKind::directional);
    static SmoothnessProfile infinite(std::vector<LipschitzRule> rules, LipschitzRule tail,
                                      DerivativeKind kind = DerivativeKind::directional);

    /*!
     * Parses "k=<int|inf>;kind=<directional|partial>;L0=<rule>;...;tail=<rule>".
     * Finite k needs L0..Lk; infinite k needs a tail and any L_j are
     * explicit overrides.
     */
    static SmoothnessProfile parse(const std::string& text);
    std::string to_string() const;

    bool is_infinite() const noexcept { return tail_.has_value(); }
    std::optional<std::size_t> k() const noexcept;
    DerivativeKind kind() const noexcept { return kind_; }
    const std::vector<LipschitzRule>& explicit_rules() const noexcept { return rules_; }
    const std::optional<LipschitzRule>& tail() const noexcept { return tail_; }

    const LipschitzRule& rule(std::size_t j) const;
    double log_L(std::size_t j, std::size_t d) const { return rule(j).log_value(j, d); }

    // Partial-derivative bounds times d^{j/2}; identity for directional.
    SmoothnessProfile to_directional() const;
    // Every L_{j,d} multiplied by exp(log_factor).
    SmoothnessProfile scaled(double log_factor) const;

  private:
    SmoothnessProfile() = default;

    std::vector<LipschitzRule> rules_;
    std::optional<LipschitzRule> tail_;
    DerivativeKind kind_ = DerivativeKind::directional;
};

enum class Direction { lower, upper };

struct BoundReport {
    double log_value = 0.0;
    std::string theorem;
    bool preconditions_met = true;
    std::string explanation;
    Direction direction = Direction::lower;
    std::vector<std::pair<std::string, double>> extras;

    double value() const;
};

// Lower bound (1 - a eps)(a L_d sqrt(d) / (3 sqrt(2 e pi)))^d.
BoundReport lb_lipschitz(double eps, std::size_t d, double L_d, double a);
// Lower bound (1 - eps)/(d + 1) (8/7)^d for the gradient class on the cube.
BoundReport lb_lipgrad_cube(double eps, std::size_t d);
// Lower bound (1 - eps) eta^d.
BoundReport lb_higher(double eps, std::size_t d, double eta);
// One-point error bound R L_d sqrt(d) + 2 tail.
BoundReport ub_one_point_c0(double L_d, std::size_t d, double R, double tail);
// One-point error bound L1 diam^2, or R^2 L1 d + 2 tail when (R, tail) given.
BoundReport ub_one_point_c1(double L1, double diam, std::optional<std::pair<double, double>> radius_tail = {},
                            std::size_t d = 0);
// Taylor error bound R^{j+1}/j! L_{j,d} d^{(j+1)/2}.
BoundReport ub_taylor(std::size_t j, double L_jd, std::size_t d, double R);
// ln n <= k_eps (1 + ln d), k_eps = ceil(log_a(c/eps)); extras carry k_eps
// and the closed envelope.
BoundReport qpt_bound(double eps, std::size_t d, double c, double a);
// ln n <= (1 + ln d) max{e^2 rad, ln(rad/eps)}.
BoundReport cor64_bound(double eps, std::size_t d, double rad);
// Limit of (d-1) ln 2 / (d^alpha + 2^alpha d^{alpha m}); positive certifies
// the failure of uniform weak tractability for finite smoothness k.
BoundReport not_uwt_witness(double m, std::optional<std::size_t> k, double alpha);

enum class DomainFamily { cube, small_radius, convex_P, convex };

DomainFamily parse_domain_family(const std::string& text);
std::string to_string(DomainFamily family);

struct ClassifyParams {
    // sup_d rad(D_d)/sqrt(d) of the family; 1/2 is used for the cube.
    std::optional<double> radius_ratio;
};

enum class VerdictKind { curse, no_curse, QPT, WT, UWT, not_UWT, indeterminate_gap };

std::string to_string(VerdictKind kind);

struct BoundSample {
    std::size_t d;
    double eps;
    double log_bound;
    Direction direction;
};

struct Verdict {
    VerdictKind kind = VerdictKind::indeterminate_gap;
    std::string theorem;
    std::string explanation;
    std::vector<VerdictKind> implied;
    std::vector<std::pair<std::string, double>> witness;
    std::vector<BoundSample> samples;
};

/*!
 * Tractability verdict for a profile on a domain family. Throws
 * UnsupportedCombination when no known result applies.
 */
Verdict classify(const SmoothnessProfile& profile, DomainFamily family, const ClassifyParams& params = {});

}  // namespace curse
