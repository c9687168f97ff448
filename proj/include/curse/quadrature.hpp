// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curse/bounds.hpp"
#include "curse/fooling.hpp"
#include "curse/geometry.hpp"
#include "curse/parallel.hpp"

namespace curse {

using MultiIndex = std::vector<unsigned>;

/*!
 * An integrand on a volume-one domain. Only eval is required; the optional
 * pieces supply exact derivative information, declared smoothness, and a
 * known integral for test families. Callables must be thread-safe.
 */
struct Integrand {
    std::function<double(std::span<const double>)> eval;
    std::function<std::vector<double>(std::span<const double>)> analytic_gradient;
    std::function<double(std::span<const double>, const MultiIndex&)> analytic_partial;
    std::optional<SmoothnessProfile> declared_profile;
    std::optional<double> exact_integral;
    std::string name;
};

enum class QuadAlgorithm { one_point, taylor };

struct QuadratureResult {
    double value = 0.0;
    std::size_t evaluations_used = 0;
    std::optional<double> error_bound;
    QuadAlgorithm algorithm = QuadAlgorithm::one_point;
    std::size_t order = 0;  // j for taylor

    std::string algorithm_label() const;
};

// f at the domain center; error bound from the declared L_0 when present.
QuadratureResult quad_one_point(const Integrand& f, const DomainSpec& dom);

// int_0^1 (x - 1/2)^b dx.
double cube_moment(unsigned b);

// Default central-difference step for a derivative of total order m.
double default_fd_step(unsigned m);

/*!
 * D^beta f(x) by tensor-product central differences with step h:
 * prod_i h^{-b_i} sum_m (-1)^m C(b_i, m) f(x + (b_i/2 - m) h e_i).
 * With a domain, every stencil node must lie in its closure
 * (StencilOutsideDomain otherwise). |beta| <= 8.
 */
double fd_partial(const Integrand& f, std::span<const double> x, const MultiIndex& beta, double h,
                  const DomainSpec* dom = nullptr);

// Nodes of the fd_partial stencil, in evaluation order (with repeats removed).
std::vector<std::vector<double>> fd_stencil(std::span<const double> x, const MultiIndex& beta, double h);

/*!
 * Taylor quadrature of order j at the cube center:
 * sum over beta with |beta| <= j and all components even of
 * D^beta f(c)/beta! prod_i cube_moment(beta_i). Odd terms vanish and cost
 * nothing. Derivatives come from analytic_partial when present, otherwise
 * from fd_partial (step h, or default_fd_step(|beta|)) through an evaluation
 * cache; evaluations_used counts distinct points (analytic: one per term).
 */
QuadratureResult quad_taylor(const Integrand& f, const DomainSpec& dom, unsigned j,
                             std::optional<double> h = std::nullopt, const ExecConfig& exec = {});

// The multi-indices quad_taylor sums over, lexicographic.
std::vector<MultiIndex> even_multi_indices(std::size_t d, unsigned j);

struct McIntegral {
    double mean = 0.0;
    double half_width_95 = 0.0;
};

// Plain Monte Carlo mean of f over the domain. N >= 1000.
McIntegral reference_integral(const Integrand& f, const DomainSpec& dom, std::size_t N, std::uint64_t seed,
                              const ExecConfig& exec = {});

/*!
 * eps0 sin(<a, x> + b) with exact partials, the Taylor-ready profile
 * L_{j,d} = eps0 |a|^{j+1}, and the exact cube integral
 * eps0 Im(e^{ib} prod_k (e^{i a_k} - 1)/(i a_k)).
 */
Integrand sine_ridge(std::vector<double> a, double b, double eps0);

// Wraps c0 or c1 fooling functions; c0 carries L_0 = L_d as profile. Holds f by
// reference, so f must outlive the integrand.
Integrand fooling_integrand(const FoolingFunction& f);

}  // namespace curse
