// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/volume.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "curse/errors.hpp"

namespace curse {
namespace {

constexpr double kMinSamples = 1000;

double quadrature_integral(double alpha, double delta, double c) {
    auto integrand = [&](double x) { return std::exp(alpha * (delta * delta - (x - c) * (x - c))); };
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 20, 1e-14, &error);
}

void check_samples(std::size_t N, const char* who) {
    if (static_cast<double>(N) < kMinSamples) {
        throw PreconditionError(std::string(who) + ": at least 1000 samples are required");
    }
}

}  // namespace

double profile_integral(double alpha, double delta, double eta) {
    if (!(delta > 0.0)) throw DomainError("profile_integral: delta must be > 0");
    if (!(eta >= 0.0)) throw DomainError("profile_integral: eta must be >= 0");
    if (!std::isfinite(alpha)) throw DomainError("profile_integral: alpha must be finite");
    const double c = 0.5 + eta;
    if (alpha == 0.0) return 1.0;
    if (alpha < 0.0 || alpha * c * c > 700.0) return quadrature_integral(alpha, delta, c);

    // exp(alpha delta^2) int_0^1 exp(-alpha (x - c)^2) dx
    const double s = std::sqrt(alpha);
    double mass;
    if (c <= 1.0) {
        mass = std::erf(s * (1.0 - c)) + std::erf(s * c);
    } else {
        mass = std::erfc(s * (c - 1.0)) - std::erfc(s * c);
    }
    return std::exp(alpha * delta * delta) * std::sqrt(std::numbers::pi) / (2.0 * s) * mass;
}

GammaConstant gamma_constant(double delta, double eta) {
    GammaConstant out;
    out.delta = delta;
    out.eta = eta;
    out.slope_at_zero = profile_slope_at_zero(delta, eta);
    if (!(delta > 0.0)) throw DomainError("gamma_constant: delta must be > 0");
    if (!(eta >= 0.0)) throw DomainError("gamma_constant: eta must be >= 0");
    // Slopes at the rounding level of delta^2 - eta^2 - 1/12 count as zero.
    if (out.slope_at_zero >= -1e-15) return out;

    auto I = [&](double a) { return profile_integral(a, delta, eta); };

    // Expand until I turns upward. When delta < eta - 1/2 the integral decays
    // forever; the cap then reports the value at a very large alpha.
    constexpr double kAlphaCap = 1048576.0;
    double hi = 1.0;
    double f_hi = I(hi);
    while (hi < kAlphaCap) {
        const double f_next = I(2.0 * hi);
        if (f_next >= f_hi) break;
        hi *= 2.0;
        f_hi = f_next;
    }
    double a = hi >= 2.0 ? hi / 2.0 : 0.0;
    double b = 2.0 * hi;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = I(x1);
    double f2 = I(x2);
    while (b - a > 1e-8) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = I(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = I(x2);
        }
    }
    out.alpha_star = 0.5 * (a + b);
    out.value = std::min({1.0, I(out.alpha_star), f1, f2});
    return out;
}

GammaConstant gamma_tilde(double delta) { return gamma_constant(0.25 + delta, 0.25); }

double thm21_bound(std::size_t n, std::size_t d, double radius_ratio, double delta) {
    if (n < 1) throw PreconditionError("thm21_bound: n must be >= 1");
    if (d < 1) throw PreconditionError("thm21_bound: d must be >= 1");
    if (!(radius_ratio > 0.0)) throw PreconditionError("thm21_bound: R_d must be > 0");
    if (!(delta >= 0.0)) throw PreconditionError("thm21_bound: delta must be >= 0");
    const double base = (radius_ratio + 2.0 * delta) * std::sqrt(std::numbers::pi * std::numbers::e / 2.0);
    return std::log(static_cast<double>(n)) + static_cast<double>(d) * std::log(base);
}

double thm23_bound(std::size_t n, std::size_t d, double delta) {
    if (n < 1) throw PreconditionError("thm23_bound: n must be >= 1");
    if (d < 1) throw PreconditionError("thm23_bound: d must be >= 1");
    if (!(delta >= 0.0 && delta < 1.0 / 12.0)) throw DomainError("thm23_bound: delta must lie in [0, 1/12)");
    const double g = gamma_tilde(delta).value;
    return std::log(static_cast<double>(n) * static_cast<double>(d + 1)) + static_cast<double>(d) * std::log(g);
}

std::string to_string(BoundSource source) {
    switch (source) {
        case BoundSource::thm21:
            return "thm21";
        case BoundSource::thm23:
            return "thm23";
        case BoundSource::none:
            break;
    }
    return "none";
}

double binomial_half_width(std::uint64_t hits, std::size_t samples) {
    if (samples == 0) return 0.0;
    const double n = static_cast<double>(samples);
    const double p = static_cast<double>(hits) / n;
    constexpr double z = 1.96;
    if (static_cast<double>(hits) >= 10.0) return z * std::sqrt(p * (1.0 - p) / n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double spread = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return std::max(center + spread - p, p - (center - spread));
}

namespace {

template <class Hit>
std::uint64_t count_hits(const DomainSpec& dom, std::size_t N, std::uint64_t seed, const ExecConfig& exec,
                         Hit&& make_hit) {
    const auto counts = map_chunks<std::uint64_t>(chunk_count(N), exec, [&](std::size_t c) -> std::uint64_t {
        Sampler rng(seed, c);
        auto hit = make_hit();
        std::vector<double> x(dom.dim());
        const std::size_t begin = c * kChunkSamples;
        const std::size_t end = std::min(N, begin + kChunkSamples);
        std::uint64_t local = 0;
        for (std::size_t s = begin; s < end; ++s) {
            dom.sample(rng, x);
            local += hit(x) ? 1 : 0;
        }
        return local;
    });
    std::uint64_t total = 0;
    for (auto v : counts) total += v;
    return total;
}

VolumeEstimate finish(std::uint64_t hits, std::size_t N, std::uint64_t seed) {
    VolumeEstimate out;
    out.samples = N;
    out.seed = seed;
    out.mean = static_cast<double>(hits) / static_cast<double>(N);
    out.half_width_95 = binomial_half_width(hits, N);
    return out;
}

}  // namespace

VolumeEstimate mc_hull_neighborhood_volume(const PointSet& ps, const DomainSpec& dom, double delta, std::size_t N,
                                           std::uint64_t seed, const ExecConfig& exec) {
    check_samples(N, "mc_hull_neighborhood_volume");
    if (ps.dim() != dom.dim()) throw PreconditionError("mc_hull_neighborhood_volume: dimension mismatch");
    if (!(delta >= 0.0)) throw PreconditionError("mc_hull_neighborhood_volume: delta must be >= 0");
    const std::size_t d = dom.dim();
    const double reach = delta * std::sqrt(static_cast<double>(d));

    std::uint64_t hits = 0;
    if (reach > 0.0) {
        hits = count_hits(dom, N, seed, exec, [&] {
            return [solver = std::make_shared<WolfeSolver>(ps), reach](std::span<const double> x) {
                return solver->within(x, reach);
            };
        });
    }
    VolumeEstimate out = finish(hits, N, seed);

    out.bound_log = thm21_bound(ps.size(), d, dom.radius_ratio(), delta);
    out.bound_source = BoundSource::thm21;
    if (dom.kind() == DomainKind::cube && delta < 1.0 / 12.0) {
        const double alt = thm23_bound(ps.size(), d, delta);
        if (alt < *out.bound_log) {
            out.bound_log = alt;
            out.bound_source = BoundSource::thm23;
        }
    }
    out.pass = out.mean <= std::exp(*out.bound_log) + 3.0 * out.sigma();
    return out;
}

VolumeEstimate property_p_tail(const DomainSpec& dom, std::span<const double> x_star, double R, std::size_t N,
                               std::uint64_t seed, const ExecConfig& exec) {
    check_samples(N, "property_p_tail");
    if (x_star.size() != dom.dim()) throw PreconditionError("property_p_tail: center dimension mismatch");
    if (!dom.contains(x_star, 1e-12)) throw PreconditionError("property_p_tail: center lies outside the domain");
    if (!(R >= 0.0)) throw PreconditionError("property_p_tail: R must be >= 0");
    const double reach2 = R * R * static_cast<double>(dom.dim());
    const auto hits = count_hits(dom, N, seed, exec, [&] {
        return [&](std::span<const double> x) {
            double r2 = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - x_star[k]) * (x[k] - x_star[k]);
            return r2 >= reach2;
        };
    });
    return finish(hits, N, seed);
}

}  // namespace curse
