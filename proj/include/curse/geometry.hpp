// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "curse/rng.hpp"

namespace curse {

// Exponent p of an l_p norm; infinity is its own case, never a float sentinel.
class LpExponent {
  public:
    static LpExponent finite(double p);
    static LpExponent infinity() noexcept { return LpExponent(true, 0.0); }

    // Parses "2", "1.5", "inf".
    static LpExponent parse(const std::string& text);

    bool is_infinite() const noexcept { return infinite_; }
    double value() const;  // throws for infinity
    std::string to_string() const;

    friend bool operator==(const LpExponent&, const LpExponent&) = default;

  private:
    LpExponent(bool infinite, double p) noexcept : infinite_(infinite), p_(p) {}

    bool infinite_;
    double p_;
};

// Volume of the unit l_p ball, 2^d Gamma(1+1/p)^d / Gamma(1+d/p).
double log_lp_unit_ball_volume(LpExponent p, std::size_t d);
double lp_unit_ball_volume(LpExponent p, std::size_t d);

// Volume of the Euclidean ball of the given (absolute) radius in R^d.
double log_euclidean_ball_volume(std::size_t d, double radius);

// Radius of the volume-one l_p ball, absolute and relative to sqrt(d).
struct NormalizedRadius {
    LpExponent p;
    std::size_t d;
    double value;
    double ratio;
};

NormalizedRadius lp_normalized_radius(LpExponent p, std::size_t d);

// limsup_d rad/sqrt(d) of the volume-one l_p balls; +infinity for p < 2.
double radius_limit_ratio(LpExponent p);

// 2 (p e)^{1/p} Gamma(1+1/p) - sqrt(pi e / 2); its root on (2, inf) is p*.
double p_star_residual(double p);

// Root p* of p_star_residual, bisected on [2, 1e6] to unit width and then
// refined by Brent's method until |residual| < tol.
double solve_p_star(double tol);

// Volume of the ball of radius delta*sqrt(d) and the two closed-form upper
// bounds for it: (delta sqrt(2 pi e))^d and (3 delta sqrt(2 e pi))^d / sqrt(pi d).
struct BallVolumeBounds {
    double log_exact;
    double log_crude;
    double log_refined;

    double exact() const;
    double crude() const;
    double refined() const;
};

BallVolumeBounds ball_volume_bounds(std::size_t d, double delta);

enum class DomainKind { cube, lp_ball };

//---------------------------------------------------------------------------//
/*!
 * A volume-one integration domain: the open unit cube (0,1)^d, or the l_p
 * ball centered at the origin and rescaled to volume one.
 */
class DomainSpec {
  public:
    static DomainSpec cube(std::size_t d);
    static DomainSpec lp_ball(LpExponent p, std::size_t d);

    // Parses "cube", "lp:2", "lp:inf".
    static DomainSpec parse(const std::string& text, std::size_t d);

    DomainKind kind() const noexcept { return kind_; }
    LpExponent p() const noexcept { return p_; }
    std::size_t dim() const noexcept { return dim_; }
    double volume() const noexcept { return 1.0; }
    const std::vector<double>& center() const noexcept { return center_; }

    // Chebyshev radius (Euclidean, absolute units) and radius / sqrt(d).
    double radius() const noexcept { return radius_; }
    double radius_ratio() const noexcept;
    double diameter() const noexcept { return 2.0 * radius_; }

    // Factor mapping the unit l_p ball onto this domain (1 for the cube).
    double scale() const noexcept { return scale_; }

    bool contains(std::span<const double> x, double slack = 0.0) const;

    // Uniform sample; cube by iid uniforms, l_p ball by the generalized
    // Gamma radial construction.
    void sample(Sampler& rng, std::span<double> out) const;

    std::string label() const;

  private:
    DomainSpec(DomainKind kind, LpExponent p, std::size_t dim);

    DomainKind kind_;
    LpExponent p_;
    std::size_t dim_;
    double scale_;
    double radius_;
    std::vector<double> center_;
};

}  // namespace curse
