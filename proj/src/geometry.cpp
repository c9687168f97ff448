// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "curse/errors.hpp"

namespace curse {
namespace {

void require_dimension(std::size_t d) {
    if (d < 1) throw DomainError("dimension must be >= 1");
}

double log_unit_ball_volume_finite(double p, double d) {
    return d * std::log(2.0) + d * std::lgamma(1.0 + 1.0 / p) - std::lgamma(1.0 + d / p);
}

// Brent's method on a bracket [a, b] with f(a) f(b) <= 0.
template <class F>
double brent_root(F&& f, double a, double b, double tol) {
    double fa = f(a);
    double fb = f(b);
    if (fa * fb > 0.0) throw std::logic_error("brent_root: bracket does not change sign");
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, step = b - a, prev_step = step;
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(fb) < tol) return b;
        if (fb * fc > 0.0) {
            c = a;
            fc = fa;
            step = prev_step = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double x_tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
        const double mid = 0.5 * (c - b);
        if (std::abs(mid) <= x_tol) return b;
        if (std::abs(prev_step) >= x_tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * mid * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * mid * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * mid * q - std::abs(x_tol * q), std::abs(prev_step * q))) {
                prev_step = step;
                step = p / q;
            } else {
                step = mid;
                prev_step = mid;
            }
        } else {
            step = mid;
            prev_step = mid;
        }
        a = b;
        fa = fb;
        b += std::abs(step) > x_tol ? step : (mid > 0.0 ? x_tol : -x_tol);
        fb = f(b);
    }
    return b;
}

}  // namespace

LpExponent LpExponent::finite(double p) {
    if (!std::isfinite(p)) throw DomainError("finite l_p exponent must be a finite number");
    if (p < 1.0) throw DomainError("l_p exponent must be >= 1");
    return LpExponent(false, p);
}

LpExponent LpExponent::parse(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
    std::size_t used = 0;
    double p = 0.0;
    try {
        p = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError("cannot parse l_p exponent '" + text + "'");
    }
    if (used != text.size()) throw DomainError("cannot parse l_p exponent '" + text + "'");
    return finite(p);
}

double LpExponent::value() const {
    if (infinite_) throw DomainError("l_p exponent is infinite");
    return p_;
}

std::string LpExponent::to_string() const {
    if (infinite_) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", p_);
    return buf;
}

double log_lp_unit_ball_volume(LpExponent p, std::size_t d) {
    require_dimension(d);
    const double dd = static_cast<double>(d);
    if (p.is_infinite()) return dd * std::log(2.0);
    return log_unit_ball_volume_finite(p.value(), dd);
}

double lp_unit_ball_volume(LpExponent p, std::size_t d) {
    return std::exp(log_lp_unit_ball_volume(p, d));
}

double log_euclidean_ball_volume(std::size_t d, double radius) {
    require_dimension(d);
    if (radius < 0.0) throw DomainError("ball radius must be >= 0");
    if (radius == 0.0) return -std::numeric_limits<double>::infinity();
    const double dd = static_cast<double>(d);
    return log_unit_ball_volume_finite(2.0, dd) + dd * std::log(radius);
}

NormalizedRadius lp_normalized_radius(LpExponent p, std::size_t d) {
    require_dimension(d);
    const double dd = static_cast<double>(d);
    double value;
    if (p.is_infinite()) {
        value = 0.5 * std::sqrt(dd);
    } else {
        const double pv = p.value();
        const double log_scale = std::lgamma(1.0 + dd / pv) / dd - std::log(2.0) - std::lgamma(1.0 + 1.0 / pv);
        value = std::exp(log_scale + std::max(0.0, 0.5 - 1.0 / pv) * std::log(dd));
    }
    return {p, d, value, value / std::sqrt(dd)};
}

double radius_limit_ratio(LpExponent p) {
    if (p.is_infinite()) return 0.5;
    const double pv = p.value();
    if (pv < 2.0) return std::numeric_limits<double>::infinity();
    return 1.0 / (2.0 * std::pow(pv * std::numbers::e, 1.0 / pv) * std::tgamma(1.0 + 1.0 / pv));
}

double p_star_residual(double p) {
    const double lhs = 2.0 * std::exp((std::log(p) + 1.0) / p + std::lgamma(1.0 + 1.0 / p));
    return lhs - std::sqrt(std::numbers::pi * std::numbers::e / 2.0);
}

double solve_p_star(double tol) {
    if (!(tol > 0.0)) throw DomainError("solve_p_star: tol must be > 0");
    double lo = 2.0;
    double hi = 1e6;
    double f_lo = p_star_residual(lo);
    const double f_hi = p_star_residual(hi);
    if (f_lo * f_hi > 0.0) throw std::logic_error("solve_p_star: bracket [2, 1e6] does not change sign");
    while (hi - lo > 1.0) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = p_star_residual(mid);
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return brent_root(p_star_residual, lo, hi, tol);
}

double BallVolumeBounds::exact() const { return std::exp(log_exact); }
double BallVolumeBounds::crude() const { return std::exp(log_crude); }
double BallVolumeBounds::refined() const { return std::exp(log_refined); }

BallVolumeBounds ball_volume_bounds(std::size_t d, double delta) {
    require_dimension(d);
    if (!(delta > 0.0)) throw DomainError("ball_volume_bounds: delta must be > 0");
    const double dd = static_cast<double>(d);
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    BallVolumeBounds out;
    out.log_exact = log_euclidean_ball_volume(d, delta * std::sqrt(dd));
    out.log_crude = dd * std::log(delta * std::sqrt(two_pi_e));
    out.log_refined = dd * std::log(3.0 * delta * std::sqrt(two_pi_e)) - 0.5 * std::log(std::numbers::pi * dd);
    return out;
}

//---------------------------------------------------------------------------//

DomainSpec::DomainSpec(DomainKind kind, LpExponent p, std::size_t dim)
    : kind_(kind), p_(p), dim_(dim), scale_(1.0), radius_(0.0) {
    require_dimension(dim);
    const double dd = static_cast<double>(dim);
    if (kind == DomainKind::cube) {
        center_.assign(dim, 0.5);
        radius_ = 0.5 * std::sqrt(dd);
    } else {
        center_.assign(dim, 0.0);
        scale_ = std::exp(-log_lp_unit_ball_volume(p, dim) / dd);
        radius_ = lp_normalized_radius(p, dim).value;
    }
}

DomainSpec DomainSpec::cube(std::size_t d) { return DomainSpec(DomainKind::cube, LpExponent::infinity(), d); }

DomainSpec DomainSpec::lp_ball(LpExponent p, std::size_t d) { return DomainSpec(DomainKind::lp_ball, p, d); }

DomainSpec DomainSpec::parse(const std::string& text, std::size_t d) {
    if (text == "cube") return cube(d);
    if (text.rfind("lp:", 0) == 0) return lp_ball(LpExponent::parse(text.substr(3)), d);
    throw DomainError("unknown domain '" + text + "' (expected cube or lp:<p>)");
}

double DomainSpec::radius_ratio() const noexcept { return radius_ / std::sqrt(static_cast<double>(dim_)); }

bool DomainSpec::contains(std::span<const double> x, double slack) const {
    if (x.size() != dim_) throw DomainError("point dimension does not match domain");
    if (kind_ == DomainKind::cube) {
        return std::all_of(x.begin(), x.end(), [&](double v) { return v >= -slack && v <= 1.0 + slack; });
    }
    if (p_.is_infinite()) {
        return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= scale_ + slack; });
    }
    const double p = p_.value();
    double acc = 0.0;
    for (double v : x) acc += std::pow(std::abs(v), p);
    return std::pow(acc, 1.0 / p) <= scale_ + slack;
}

void DomainSpec::sample(Sampler& rng, std::span<double> out) const {
    if (out.size() != dim_) throw DomainError("sample buffer dimension does not match domain");
    if (kind_ == DomainKind::cube) {
        for (auto& v : out) v = rng.uniform();
        return;
    }
    if (p_.is_infinite()) {
        for (auto& v : out) v = rng.uniform() - 0.5;
        return;
    }
    const double p = p_.value();
    if (p == 2.0) {
        rng.ball(out, scale_);
        return;
    }
    double norm_p = 0.0;  // sum |X_i|^p
    for (auto& v : out) {
        const double g = rng.gamma(1.0 / p);
        v = rng.sign() * std::pow(g, 1.0 / p);
        norm_p += g;
    }
    const double dd = static_cast<double>(dim_);
    const double factor = scale_ * std::pow(rng.uniform_open(), 1.0 / dd) / std::pow(norm_p, 1.0 / p);
    for (auto& v : out) v *= factor;
}

std::string DomainSpec::label() const {
    if (kind_ == DomainKind::cube) return "cube";
    return "lp:" + p_.to_string();
}

}  // namespace curse
