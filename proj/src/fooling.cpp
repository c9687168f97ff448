// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/fooling.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "curse/errors.hpp"
#include "curse/rng.hpp"
#include "curse/special.hpp"

namespace curse {

ProfileP::ProfileP(double delta, std::size_t d) : delta_(delta), d_(d) {
    if (!(delta > 0.0)) throw DomainError("ProfileP: delta must be > 0");
    if (d < 1) throw DomainError("ProfileP: d must be >= 1");
    scale_ = delta * delta * static_cast<double>(d);
}

ProfileP::Value ProfileP::operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError("ProfileP: t must be >= 0");
    if (t <= scale_ / 4.0) return {2.0 * t / scale_, 2.0 / scale_};
    if (t >= scale_) return {1.0, 0.0};
    const double root = std::sqrt(scale_);  // delta sqrt(d)
    const double s = std::sqrt(t);
    return {-2.0 * t / scale_ + 4.0 * s / root - 1.0, -2.0 / scale_ + 2.0 / (root * s)};
}

ProfileP::Value profile_eval(const ProfileP& pp, double t) { return pp(t); }

double fooling_c0_eval(const PointSet& hull, double L_d, std::span<const double> x) {
    if (!(L_d > 0.0)) throw DomainError("fooling_c0_eval: L_d must be > 0");
    return std::min(1.0, L_d * project_onto_hull(x, hull).distance);
}

namespace {

C1Value c1_with(WolfeSolver& solver, const ProfileP& p, std::span<const double> x) {
    const std::size_t d = x.size();
    const double reach = p.delta() * std::sqrt(static_cast<double>(d));
    const HullProjection proj = solver.project(x);
    C1Value out;
    out.gradient.assign(d, 0.0);
    if (proj.distance <= reach) return out;
    const double gap = proj.distance - reach;  // dist(x, K_delta)
    const auto [value, deriv] = p(gap * gap);
    out.value = value;
    if (deriv != 0.0) {
        // x - P_{K_delta}(x) = (gap / dist) (x - P_K(x))
        const double factor = 2.0 * deriv * gap / proj.distance;
        for (std::size_t i = 0; i < d; ++i) out.gradient[i] = factor * (x[i] - proj.nearest[i]);
    }
    return out;
}

}  // namespace

C1Value fooling_c1_eval(const PointSet& hull, double delta, std::span<const double> x) {
    if (x.size() != hull.dim()) throw PreconditionError("fooling_c1_eval: dimension mismatch");
    WolfeSolver solver(hull);
    return c1_with(solver, ProfileP(delta, hull.dim()), x);
}

//---------------------------------------------------------------------------//

AlphaSequence AlphaSequence::uniform(std::size_t k) {
    if (k < 1) throw DomainError("AlphaSequence: uniform length must be >= 1");
    AlphaSequence s;
    s.kind_ = AlphaKind::uniform;
    s.k_ = k;
    return s;
}

AlphaSequence AlphaSequence::power(double eta) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("AlphaSequence: eta must be > 0");
    AlphaSequence s;
    s.kind_ = AlphaKind::power;
    s.eta_ = eta;
    s.c_eta_ = 1.0 / riemann_zeta(1.0 + eta);
    return s;
}

double AlphaSequence::operator[](std::size_t j) const {
    if (j < 1) throw DomainError("AlphaSequence: indices start at 1");
    if (kind_ == AlphaKind::uniform) return j <= k_ ? 1.0 / static_cast<double>(k_) : 0.0;
    return c_eta_ * std::pow(static_cast<double>(j), -1.0 - eta_);
}

double AlphaSequence::partial_sum(std::size_t k) const {
    if (kind_ == AlphaKind::uniform) return static_cast<double>(std::min(k, k_)) / static_cast<double>(k_);
    return 1.0 - tail_sum(k);
}

double AlphaSequence::tail_sum(std::size_t k) const {
    if (kind_ == AlphaKind::uniform) return k >= k_ ? 0.0 : static_cast<double>(k_ - k) / static_cast<double>(k_);
    return c_eta_ * zeta_tail(1.0 + eta_, static_cast<long long>(k) + 1);
}

std::string AlphaSequence::to_string() const {
    if (kind_ == AlphaKind::uniform) return "uniform(" + std::to_string(k_) + ")";
    char buf[48];
    std::snprintf(buf, sizeof buf, "power(%.17g)", eta_);
    return buf;
}

AlphaSequence make_alpha_sequence(AlphaKind kind, double k_or_eta) {
    if (kind == AlphaKind::uniform) {
        if (!(k_or_eta >= 1.0) || k_or_eta != std::floor(k_or_eta)) {
            throw DomainError("make_alpha_sequence: k must be a positive integer");
        }
        return AlphaSequence::uniform(static_cast<std::size_t>(k_or_eta));
    }
    return AlphaSequence::power(k_or_eta);
}

//---------------------------------------------------------------------------//

std::string to_string(FoolingVariant variant) {
    switch (variant) {
        case FoolingVariant::c0:
            return "c0";
        case FoolingVariant::c1:
            return "c1";
        case FoolingVariant::smoothed:
            return "smoothed";
        case FoolingVariant::cinf_truncated:
            break;
    }
    return "cinf_truncated";
}

SmoothnessProfile certificate(FoolingVariant variant, double delta, std::size_t k, std::optional<double> eta) {
    if (!(delta > 0.0)) throw DomainError("certificate: delta must be > 0");
    LipschitzRule l0;
    l0.log_constant = std::log(2.0 / delta);
    l0.rate = 0.5;
    LipschitzRule l1;
    l1.log_constant = std::log(40.0 / (delta * delta));
    l1.rate = 1.0;
    switch (variant) {
        case FoolingVariant::c0:
            throw PreconditionError("certificate: the c0 variant is described by L_d alone");
        case FoolingVariant::c1:
            return SmoothnessProfile::finite({l0, l1});
        case FoolingVariant::smoothed: {
            if (k < 1) throw PreconditionError("certificate: smoothed needs k >= 1");
            std::vector<LipschitzRule> rules{l0};
            for (std::size_t j = 1; j <= k; ++j) {
                LipschitzRule r = l1;
                if (j > 1) r.log_constant += static_cast<double>(j - 1) * std::log(static_cast<double>(k - 1) / delta);
                rules.push_back(r);
            }
            return SmoothnessProfile::finite(std::move(rules));
        }
        case FoolingVariant::cinf_truncated: {
            if (!eta || !(*eta > 0.0)) throw PreconditionError("certificate: cinf needs eta > 0");
            const double log_c_eta = -std::log(riemann_zeta(1.0 + *eta));
            // (40/d) delta^{-1-j} c_eta^{1-j} ((j-1)!)^{1+eta}
            LipschitzRule tail;
            tail.log_constant = std::log(40.0) - std::log(delta) + log_c_eta;
            tail.log_geometric = -std::log(delta) - log_c_eta;
            tail.factorial_power = 1.0 + *eta;
            tail.factorial_offset = 1.0;
            tail.rate = 1.0;
            return SmoothnessProfile::infinite({l0}, tail);
        }
    }
    throw PreconditionError("certificate: unknown variant");
}

//---------------------------------------------------------------------------//

FoolingFunction FoolingFunction::c0(PointSet hull, double L_d) {
    if (!(L_d > 0.0)) throw DomainError("FoolingFunction: L_d must be > 0");
    FoolingFunction f(FoolingVariant::c0, std::move(hull));
    f.L_d_ = L_d;
    return f;
}

FoolingFunction FoolingFunction::c1(PointSet hull, double delta) {
    if (!(delta > 0.0)) throw DomainError("FoolingFunction: delta must be > 0");
    FoolingFunction f(FoolingVariant::c1, std::move(hull));
    f.delta_ = delta;
    return f;
}

FoolingFunction FoolingFunction::smoothed(PointSet hull, double delta, std::size_t k) {
    if (!(delta > 0.0)) throw DomainError("FoolingFunction: delta must be > 0");
    FoolingFunction f(FoolingVariant::smoothed, std::move(hull));
    f.delta_ = delta;
    f.k_ = k;
    f.sequence_ = AlphaSequence::uniform(k);
    return f;
}

FoolingFunction FoolingFunction::cinf_truncated(PointSet hull, double delta, double eta, std::size_t k) {
    if (!(delta > 0.0)) throw DomainError("FoolingFunction: delta must be > 0");
    if (k < 1) throw DomainError("FoolingFunction: truncation level must be >= 1");
    FoolingFunction f(FoolingVariant::cinf_truncated, std::move(hull));
    f.delta_ = delta;
    f.k_ = k;
    f.sequence_ = AlphaSequence::power(eta);
    return f;
}

double FoolingFunction::lipschitz() const {
    if (variant_ == FoolingVariant::c0) return L_d_;
    return 2.0 / (delta_ * std::sqrt(static_cast<double>(dim())));
}

SmoothnessProfile FoolingFunction::certificate() const {
    if (variant_ == FoolingVariant::cinf_truncated) return curse::certificate(variant_, delta_, k_, sequence_->eta());
    return curse::certificate(variant_, delta_, k_);
}

double FoolingFunction::value(std::span<const double> x) const {
    if (x.size() != dim()) throw PreconditionError("FoolingFunction: dimension mismatch");
    switch (variant_) {
        case FoolingVariant::c0:
            return fooling_c0_eval(hull_, L_d_, x);
        case FoolingVariant::c1:
            return fooling_c1_eval(hull_, delta_, x).value;
        default:
            throw PreconditionError("FoolingFunction: smoothed variants are evaluated by Monte Carlo");
    }
}

C1Value FoolingFunction::value_and_gradient(std::span<const double> x) const {
    if (variant_ != FoolingVariant::c1) throw PreconditionError("FoolingFunction: gradient only for c1");
    return fooling_c1_eval(hull_, delta_, x);
}

double FoolingFunction::truncation_bound() const {
    if (variant_ != FoolingVariant::cinf_truncated) return 0.0;
    return lipschitz() * delta_ * std::sqrt(static_cast<double>(dim())) * sequence_->tail_sum(k_);
}

namespace {

template <class MakeField>
SmoothedValue smooth_core(MakeField&& make_field, const AlphaSequence& seq, std::size_t k, double delta,
                          std::span<const double> x, std::size_t N, std::uint64_t seed, const ExecConfig& exec) {
    if (k < 1) throw PreconditionError("smoothed_eval: k must be >= 1");
    if (N < 1000) throw PreconditionError("smoothed_eval: at least 1000 samples are required");
    if (!(delta > 0.0)) throw PreconditionError("smoothed_eval: delta must be > 0");
    if (seq.partial_sum(k) > 1.0 + 1e-12) throw PreconditionError("smoothed_eval: alpha_1 + ... + alpha_k exceeds 1");
    const std::size_t d = x.size();
    std::vector<double> radii(k);
    for (std::size_t j = 0; j < k; ++j) radii[j] = seq[j + 1] * delta * std::sqrt(static_cast<double>(d));

    auto parts = map_chunks<RunningStats>(chunk_count(N), exec, [&](std::size_t c) {
        Sampler rng(seed, c);
        auto field = make_field();
        std::vector<double> y(d), u(d);
        RunningStats stats;
        const std::size_t begin = c * kChunkSamples;
        const std::size_t end = std::min(N, begin + kChunkSamples);
        for (std::size_t s = begin; s < end; ++s) {
            std::copy(x.begin(), x.end(), y.begin());
            for (std::size_t j = 0; j < k; ++j) {
                rng.ball(u, radii[j]);
                for (std::size_t i = 0; i < d; ++i) y[i] -= u[i];
            }
            stats.push(field(y));
        }
        return stats;
    });
    const RunningStats total = merge_pairwise(std::move(parts));
    SmoothedValue out;
    out.mean = total.mean;
    out.half_width_95 = total.half_width_95();
    return out;
}

}  // namespace

SmoothedValue smoothed_eval(const ScalarField& f, const AlphaSequence& seq, std::size_t k, double delta,
                            std::span<const double> x, std::size_t N, std::uint64_t seed, const ExecConfig& exec) {
    return smooth_core([&] { return std::cref(f); }, seq, k, delta, x, N, seed, exec);
}

SmoothedValue smoothed_eval(const FoolingFunction& f, const AlphaSequence& seq, std::size_t k, double delta,
                            std::span<const double> x, std::size_t N, std::uint64_t seed, const ExecConfig& exec) {
    if (x.size() != f.dim()) throw PreconditionError("smoothed_eval: dimension mismatch");
    if (f.variant() == FoolingVariant::c0) {
        const double L = f.L_d();
        return smooth_core(
            [&] {
                return [solver = std::make_shared<WolfeSolver>(f.hull()), L](std::span<const double> y) {
                    return std::min(1.0, L * solver->distance(y));
                };
            },
            seq, k, delta, x, N, seed, exec);
    }
    const ProfileP p(f.delta(), f.dim());
    return smooth_core(
        [&] {
            return [solver = std::make_shared<WolfeSolver>(f.hull()), &p](std::span<const double> y) {
                return c1_with(*solver, p, y).value;
            };
        },
        seq, k, delta, x, N, seed, exec);
}

SmoothedValue FoolingFunction::evaluate_smoothed(std::span<const double> x, std::size_t N, std::uint64_t seed,
                                                 const ExecConfig& exec) const {
    if (!sequence_) throw PreconditionError("FoolingFunction: not a smoothed variant");
    SmoothedValue out = smoothed_eval(*this, *sequence_, k_, delta_, x, N, seed, exec);
    out.truncation_bound = truncation_bound();
    return out;
}

}  // namespace curse
