// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "curse/geometry.hpp"
#include "curse/hull.hpp"
#include "curse/parallel.hpp"

namespace curse {

/*!
 * I(alpha) = int_0^1 exp{alpha (delta^2 - (1/2+eta)^2 + 2x(1/2+eta) - x^2)} dx.
 *
 * Closed form through erf/erfc after completing the square; adaptive
 * Gauss-Kronrod when alpha (1/2+eta)^2 > 700. Negative alpha is accepted
 * (quadrature only) so that one-sided probes around 0 work.
 */
double profile_integral(double alpha, double delta, double eta);

// d/dalpha I at alpha = 0.
inline double profile_slope_at_zero(double delta, double eta) noexcept {
    return delta * delta - eta * eta - 1.0 / 12.0;
}

struct GammaConstant {
    double delta = 0.0;
    double eta = 0.0;
    double value = 1.0;
    double alpha_star = 0.0;
    double slope_at_zero = 0.0;
};

// inf_{alpha > 0} I(alpha); value 1 and alpha_star 0 when the slope at 0 is
// non-negative.
GammaConstant gamma_constant(double delta, double eta);

// gamma(1/4 + delta, 1/4), the cube base.
GammaConstant gamma_tilde(double delta);

// ln n + d ln((R_d + 2 delta) sqrt(pi e / 2)).
double thm21_bound(std::size_t n, std::size_t d, double radius_ratio, double delta);

// ln(n (d+1)) + d ln gamma_tilde(delta), delta in [0, 1/12).
double thm23_bound(std::size_t n, std::size_t d, double delta);

enum class BoundSource { thm21, thm23, none };

std::string to_string(BoundSource source);

struct VolumeEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> bound_log;
    BoundSource bound_source = BoundSource::none;
    bool pass = true;  // mean <= exp(bound) + 3 sigma; true without a bound

    double sigma() const noexcept { return half_width_95 / 1.96; }
};

/*!
 * 95% half-width of a binomial proportion: normal approximation, or the
 * largest distance from the mean to the Wilson bounds when hits < 10.
 */
double binomial_half_width(std::uint64_t hits, std::size_t samples);

// Fraction of N uniform domain points within delta sqrt(d) of conv(ps), with
// the tighter applicable analytic bound attached. N >= 1000.
VolumeEstimate mc_hull_neighborhood_volume(const PointSet& ps, const DomainSpec& dom, double delta, std::size_t N,
                                           std::uint64_t seed, const ExecConfig& exec = {});

// Mass of the domain at distance >= R sqrt(d) from x_star.
VolumeEstimate property_p_tail(const DomainSpec& dom, std::span<const double> x_star, double R, std::size_t N,
                               std::uint64_t seed, const ExecConfig& exec = {});

}  // namespace curse
