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
#include "curse/hull.hpp"
#include "curse/parallel.hpp"

namespace curse {

//---------------------------------------------------------------------------//
/*!
 * The C^1 ramp p: [0, inf) -> [0, 1],
 *
 *   2t/(delta^2 d)                                  on [0, delta^2 d/4],
 *   -2t/(delta^2 d) + 4 sqrt(t)/(delta sqrt(d)) - 1  on (delta^2 d/4, delta^2 d),
 *   1                                               beyond.
 *
 * p'' jumps at both breakpoints; p' is taken from the closed-form pieces,
 * which agree there.
 */
class ProfileP {
  public:
    ProfileP(double delta, std::size_t d);

    struct Value {
        double value;
        double deriv;
    };

    Value operator()(double t) const;

    double delta() const noexcept { return delta_; }
    std::size_t dim() const noexcept { return d_; }
    double lower_break() const noexcept { return scale_ / 4.0; }
    double upper_break() const noexcept { return scale_; }

  private:
    double delta_;
    std::size_t d_;
    double scale_;  // delta^2 d
};

ProfileP::Value profile_eval(const ProfileP& pp, double t);

// min{1, L_d dist(x, conv(hull))}.
double fooling_c0_eval(const PointSet& hull, double L_d, std::span<const double> x);

struct C1Value {
    double value = 0.0;
    std::vector<double> gradient;
};

// p(dist(x, K_delta)^2) and its gradient p'(phi) 2 (x - P_{K_delta}(x)).
C1Value fooling_c1_eval(const PointSet& hull, double delta, std::span<const double> x);

//---------------------------------------------------------------------------//

enum class AlphaKind { uniform, power };

/*!
 * Radii fractions alpha_1, alpha_2, ... of the smoothing kernels: 1/k each,
 * or c_eta j^{-1-eta} with c_eta = 1/zeta(1+eta). Indices are 1-based.
 */
class AlphaSequence {
  public:
    static AlphaSequence uniform(std::size_t k);
    static AlphaSequence power(double eta);

    AlphaKind kind() const noexcept { return kind_; }
    // k for uniform sequences (alpha_j = 0 beyond k), eta for power ones.
    std::size_t length() const noexcept { return k_; }
    double eta() const noexcept { return eta_; }
    double c_eta() const noexcept { return c_eta_; }

    double operator[](std::size_t j) const;
    double partial_sum(std::size_t k) const;
    // sum_{j > k} alpha_j
    double tail_sum(std::size_t k) const;

    std::string to_string() const;

  private:
    AlphaSequence() = default;

    AlphaKind kind_ = AlphaKind::uniform;
    std::size_t k_ = 0;
    double eta_ = 0.0;
    double c_eta_ = 1.0;
};

AlphaSequence make_alpha_sequence(AlphaKind kind, double k_or_eta);

//---------------------------------------------------------------------------//

enum class FoolingVariant { c0, c1, smoothed, cinf_truncated };

std::string to_string(FoolingVariant variant);

/*!
 * Declared Lipschitz bounds of the fooling constructions, as profiles in d:
 * c1 (L_0, L_1), smoothed(k) with the uniform sequence (L_0..L_k), and the
 * infinite-order construction with the power sequence. delta in the formulas
 * is the base ramp's delta.
 */
SmoothnessProfile certificate(FoolingVariant variant, double delta, std::size_t k = 0,
                              std::optional<double> eta = std::nullopt);

struct SmoothedValue {
    double mean = 0.0;
    double half_width_95 = 0.0;
    double truncation_bound = 0.0;  // |f_k - f_inf| for the truncated construction
};

using ScalarField = std::function<double(std::span<const double>)>;

class FoolingFunction {
  public:
    static FoolingFunction c0(PointSet hull, double L_d);
    static FoolingFunction c1(PointSet hull, double delta);
    static FoolingFunction smoothed(PointSet hull, double delta, std::size_t k);
    static FoolingFunction cinf_truncated(PointSet hull, double delta, double eta, std::size_t k = 16);

    FoolingVariant variant() const noexcept { return variant_; }
    const PointSet& hull() const noexcept { return hull_; }
    std::size_t dim() const noexcept { return hull_.dim(); }
    double delta() const noexcept { return delta_; }
    double L_d() const noexcept { return L_d_; }
    std::size_t k() const noexcept { return k_; }
    const std::optional<AlphaSequence>& sequence() const noexcept { return sequence_; }

    // Lipschitz constant of the deterministic base function.
    double lipschitz() const;
    SmoothnessProfile certificate() const;

    // Exact value for c0 and c1; smoothed variants need evaluate_smoothed.
    double value(std::span<const double> x) const;
    // c1 only.
    C1Value value_and_gradient(std::span<const double> x) const;

    // Lip(f) delta sqrt(d) sum_{j > k} alpha_j; zero unless cinf_truncated.
    double truncation_bound() const;

    // Monte Carlo value of a smoothed or truncated variant at x.
    SmoothedValue evaluate_smoothed(std::span<const double> x, std::size_t N, std::uint64_t seed,
                                    const ExecConfig& exec = {}) const;

  private:
    FoolingFunction(FoolingVariant variant, PointSet hull) : variant_(variant), hull_(std::move(hull)) {}

    FoolingVariant variant_;
    PointSet hull_;
    double delta_ = 0.0;
    double L_d_ = 0.0;
    std::size_t k_ = 0;
    std::optional<AlphaSequence> sequence_;
};

/*!
 * f_k(x) = E f(x - U_1 - ... - U_k) with U_j uniform on the ball of radius
 * alpha_j delta sqrt(d). The shifts depend only on (seed, sample index), so
 * calls with equal seeds share random numbers. N >= 1000.
 *
 * The ScalarField overload is a test hook; f must be safe to call from
 * several threads. The FoolingFunction overload smooths its C^1 base.
 */
SmoothedValue smoothed_eval(const FoolingFunction& f, const AlphaSequence& seq, std::size_t k, double delta,
                            std::span<const double> x, std::size_t N, std::uint64_t seed,
                            const ExecConfig& exec = {});
SmoothedValue smoothed_eval(const ScalarField& f, const AlphaSequence& seq, std::size_t k, double delta,
                            std::span<const double> x, std::size_t N, std::uint64_t seed,
                            const ExecConfig& exec = {});

}  // namespace curse
