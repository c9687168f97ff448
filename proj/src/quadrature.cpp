// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/quadrature.hpp"

#include <cfloat>
#include <cmath>
#include <complex>
#include <cstring>
#include <future>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "curse/errors.hpp"
#include "curse/rng.hpp"
#include "curse/special.hpp"

namespace curse {
namespace {

constexpr unsigned kMaxOrder = 8;

unsigned total_order(const MultiIndex& beta) {
    unsigned m = 0;
    for (unsigned b : beta) m += b;
    return m;
}

double binomial(unsigned n, unsigned k) {
    double out = 1.0;
    for (unsigned i = 1; i <= k; ++i) out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
    return out;
}

/*!
 * Walks the tensor stencil of beta around x, calling visit(node, weight)
 * in a fixed order. Weights exclude the 1/h^{|beta|} factor.
 */
template <class Visit>
void walk_stencil(std::span<const double> x, const MultiIndex& beta, double h, Visit&& visit) {
    const std::size_t d = x.size();
    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < d; ++i) {
        if (beta[i] > 0) axes.push_back(i);
    }
    std::vector<unsigned> m(axes.size(), 0);
    std::vector<double> node(x.begin(), x.end());
    for (;;) {
        double weight = 1.0;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const std::size_t i = axes[a];
            const unsigned b = beta[i];
            node[i] = x[i] + (0.5 * static_cast<double>(b) - static_cast<double>(m[a])) * h;
            weight *= (m[a] % 2 ? -1.0 : 1.0) * binomial(b, m[a]);
        }
        visit(std::span<const double>(node), weight);
        std::size_t a = 0;
        for (; a < axes.size(); ++a) {
            if (++m[a] <= beta[axes[a]]) break;
            m[a] = 0;
        }
        if (a == axes.size()) return;
    }
}

void check_beta(std::span<const double> x, const MultiIndex& beta, double h) {
    if (beta.size() != x.size()) throw PreconditionError("fd_partial: multi-index length does not match dimension");
    if (total_order(beta) > kMaxOrder) throw PreconditionError("fd_partial: |beta| must be <= 8");
    if (!(h > 0.0)) throw PreconditionError("fd_partial: h must be > 0");
}

void check_stencil(std::span<const double> x, const MultiIndex& beta, double h, const DomainSpec& dom) {
    walk_stencil(x, beta, h, [&](std::span<const double> node, double) {
        if (dom.contains(node)) return;
        // Report the axis that pushed the node out (largest offset on the cube).
        std::size_t worst = 0;
        double excess = -1.0;
        for (std::size_t i = 0; i < node.size(); ++i) {
            if (beta[i] == 0) continue;
            const double e = dom.kind() == DomainKind::cube ? std::max(-node[i], node[i] - 1.0)
                                                            : std::abs(node[i] - x[i]);
            if (e > excess) {
                excess = e;
                worst = i;
            }
        }
        throw StencilOutsideDomain(worst, "fd_partial: stencil leaves the domain along coordinate " +
                                              std::to_string(worst));
    });
}

template <class Eval>
double apply_stencil(std::span<const double> x, const MultiIndex& beta, double h, Eval&& eval) {
    double acc = 0.0;
    walk_stencil(x, beta, h, [&](std::span<const double> node, double weight) { acc += weight * eval(node); });
    return acc / std::pow(h, static_cast<double>(total_order(beta)));
}

// First-writer-wins evaluation cache keyed on the exact node coordinates.
class EvaluationCache {
  public:
    explicit EvaluationCache(const Integrand& f) : f_(f) {}

    double operator()(std::span<const double> node) {
        std::string key(reinterpret_cast<const char*>(node.data()), node.size() * sizeof(double));
        std::promise<double> promise;
        std::shared_future<double> future;
        {
            std::lock_guard lock(mutex_);
            auto it = map_.find(key);
            if (it != map_.end()) {
                future = it->second;
            } else {
                map_.emplace(std::move(key), promise.get_future().share());
                future = {};
            }
        }
        if (future.valid()) return future.get();
        try {
            const double v = f_.eval(node);
            promise.set_value(v);
            return v;
        } catch (...) {
            promise.set_exception(std::current_exception());
            throw;
        }
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return map_.size();
    }

  private:
    const Integrand& f_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::shared_future<double>> map_;
};

std::optional<double> declared_log_L(const Integrand& f, std::size_t j, std::size_t d) {
    if (!f.declared_profile) return std::nullopt;
    const auto k = f.declared_profile->k();
    if (k && *k < j) return std::nullopt;
    return f.declared_profile->log_L(j, d);
}

}  // namespace

std::string QuadratureResult::algorithm_label() const {
    if (algorithm == QuadAlgorithm::one_point) return "one_point";
    return "taylor(" + std::to_string(order) + ")";
}

QuadratureResult quad_one_point(const Integrand& f, const DomainSpec& dom) {
    if (!f.eval) throw PreconditionError("quad_one_point: integrand has no eval");
    QuadratureResult out;
    out.algorithm = QuadAlgorithm::one_point;
    out.value = f.eval(dom.center());
    out.evaluations_used = 1;
    const std::size_t d = dom.dim();
    const double R = dom.radius_ratio();
    std::optional<double> best;
    if (const auto l0 = declared_log_L(f, 0, d)) best = ub_one_point_c0(std::exp(*l0), d, R, 0.0).value();
    if (const auto l1 = declared_log_L(f, 1, d)) {
        const double c1 = ub_one_point_c1(std::exp(*l1), dom.diameter()).value();
        best = best ? std::min(*best, c1) : c1;
    }
    out.error_bound = best;
    return out;
}

double cube_moment(unsigned b) {
    if (b % 2) return 0.0;
    return std::pow(0.5, static_cast<double>(b)) / static_cast<double>(b + 1);
}

double default_fd_step(unsigned m) { return std::pow(DBL_EPSILON, 1.0 / (static_cast<double>(m) + 2.0)); }

double fd_partial(const Integrand& f, std::span<const double> x, const MultiIndex& beta, double h,
                  const DomainSpec* dom) {
    if (!f.eval) throw PreconditionError("fd_partial: integrand has no eval");
    check_beta(x, beta, h);
    if (dom) check_stencil(x, beta, h, *dom);
    return apply_stencil(x, beta, h, [&](std::span<const double> node) { return f.eval(node); });
}

std::vector<std::vector<double>> fd_stencil(std::span<const double> x, const MultiIndex& beta, double h) {
    check_beta(x, beta, h);
    std::vector<std::vector<double>> out;
    walk_stencil(x, beta, h, [&](std::span<const double> node, double) {
        for (const auto& seen : out) {
            if (std::memcmp(seen.data(), node.data(), node.size() * sizeof(double)) == 0) return;
        }
        out.emplace_back(node.begin(), node.end());
    });
    return out;
}

std::vector<MultiIndex> even_multi_indices(std::size_t d, unsigned j) {
    std::vector<MultiIndex> out;
    MultiIndex beta(d, 0);
    // Depth-first over coordinates in increasing order gives lexicographic output.
    auto rec = [&](auto&& self, std::size_t i, unsigned budget) -> void {
        if (i == d) {
            out.push_back(beta);
            return;
        }
        for (unsigned b = 0; b <= budget; b += 2) {
            beta[i] = b;
            self(self, i + 1, budget - b);
        }
        beta[i] = 0;
    };
    rec(rec, 0, j);
    return out;
}

QuadratureResult quad_taylor(const Integrand& f, const DomainSpec& dom, unsigned j, std::optional<double> h,
                             const ExecConfig& exec) {
    if (dom.kind() != DomainKind::cube) {
        throw UnsupportedDomain("quad_taylor: closed-form moments are available for the cube only");
    }
    if (j > kMaxOrder) throw PreconditionError("quad_taylor: j must be <= 8");
    if (h && !(*h > 0.0)) throw PreconditionError("quad_taylor: h must be > 0");
    if (!f.eval && !f.analytic_partial) throw PreconditionError("quad_taylor: integrand has no eval");
    const std::size_t d = dom.dim();
    const std::vector<double>& center = dom.center();
    const auto betas = even_multi_indices(d, j);
    const bool analytic = static_cast<bool>(f.analytic_partial);

    EvaluationCache cache(f);
    const auto terms = map_chunks<double>(betas.size(), exec, [&](std::size_t t) {
        const MultiIndex& beta = betas[t];
        double weight = 1.0;
        for (unsigned b : beta) weight *= cube_moment(b) / std::exp(log_factorial(b));
        double deriv;
        if (analytic) {
            deriv = f.analytic_partial(center, beta);
        } else {
            const double step = h ? *h : default_fd_step(total_order(beta));
            check_stencil(center, beta, step, dom);
            deriv = apply_stencil(center, beta, step, cache);
        }
        return weight * deriv;
    });

    QuadratureResult out;
    out.algorithm = QuadAlgorithm::taylor;
    out.order = j;
    for (double t : terms) out.value += t;
    out.evaluations_used = analytic ? betas.size() : cache.size();
    if (const auto lj = declared_log_L(f, j, d)) out.error_bound = ub_taylor(j, std::exp(*lj), d, 0.5).value();
    return out;
}

McIntegral reference_integral(const Integrand& f, const DomainSpec& dom, std::size_t N, std::uint64_t seed,
                              const ExecConfig& exec) {
    if (!f.eval) throw PreconditionError("reference_integral: integrand has no eval");
    if (N < 1000) throw PreconditionError("reference_integral: at least 1000 samples are required");
    auto parts = map_chunks<RunningStats>(chunk_count(N), exec, [&](std::size_t c) {
        Sampler rng(seed, c);
        std::vector<double> x(dom.dim());
        RunningStats stats;
        const std::size_t begin = c * kChunkSamples;
        const std::size_t end = std::min(N, begin + kChunkSamples);
        for (std::size_t s = begin; s < end; ++s) {
            dom.sample(rng, x);
            stats.push(f.eval(x));
        }
        return stats;
    });
    const RunningStats total = merge_pairwise(std::move(parts));
    return {total.mean, total.half_width_95()};
}

Integrand sine_ridge(std::vector<double> a, double b, double eps0) {
    if (a.empty()) throw PreconditionError("sine_ridge: direction must be non-empty");
    double norm2 = 0.0;
    for (double v : a) norm2 += v * v;
    const double norm = std::sqrt(norm2);

    Integrand f;
    f.name = "sine_ridge";
    auto phase = [a, b](std::span<const double> x) {
        double t = b;
        for (std::size_t i = 0; i < a.size(); ++i) t += a[i] * x[i];
        return t;
    };
    f.eval = [phase, eps0](std::span<const double> x) { return eps0 * std::sin(phase(x)); };
    f.analytic_gradient = [phase, a, eps0](std::span<const double> x) {
        const double c = eps0 * std::cos(phase(x));
        std::vector<double> g(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) g[i] = c * a[i];
        return g;
    };
    f.analytic_partial = [phase, a, eps0](std::span<const double> x, const MultiIndex& beta) {
        double coef = eps0;
        unsigned m = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            coef *= std::pow(a[i], static_cast<double>(beta[i]));
            m += beta[i];
        }
        return coef * std::sin(phase(x) + 0.5 * std::numbers::pi * static_cast<double>(m));
    };
    // Lip of the j-th derivative: eps0 |a|^{j+1}.
    LipschitzRule tail;
    tail.log_constant = std::log(std::abs(eps0)) + std::log(norm);
    tail.log_geometric = std::log(norm);
    f.declared_profile = SmoothnessProfile::infinite({}, tail);

    std::complex<double> prod = std::polar(1.0, b);
    for (double ak : a) {
        if (ak == 0.0) continue;
        prod *= (std::polar(1.0, ak) - 1.0) / std::complex<double>(0.0, ak);
    }
    f.exact_integral = eps0 * prod.imag();
    return f;
}

Integrand fooling_integrand(const FoolingFunction& f) {
    Integrand out;
    out.name = "fooling_" + to_string(f.variant());
    switch (f.variant()) {
        case FoolingVariant::c0: {
            out.eval = [&f](std::span<const double> x) { return f.value(x); };
            LipschitzRule l0;
            l0.log_constant = std::log(f.L_d());
            out.declared_profile = SmoothnessProfile::finite({l0});
            break;
        }
        case FoolingVariant::c1:
            out.eval = [&f](std::span<const double> x) { return f.value(x); };
            out.analytic_gradient = [&f](std::span<const double> x) { return f.value_and_gradient(x).gradient; };
            out.declared_profile = f.certificate();
            break;
        default:
            throw PreconditionError("fooling_integrand: only c0 and c1 have pointwise values");
    }
    return out;
}

}  // namespace curse
