// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "curse/bounds.hpp"
#include "curse/errors.hpp"
#include "curse/fooling.hpp"
#include "curse/geometry.hpp"
#include "curse/hull.hpp"
#include "curse/quadrature.hpp"
#include "curse/serialize.hpp"
#include "curse/volume.hpp"

namespace curse::cli {
namespace {

struct Options {
    // common
    std::string config;
    unsigned threads = 0;
    std::string output;
    std::string format;
    std::string plot_data;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> point_seed;

    // constants
    bool gamma = false;
    bool gamma_tilde = false;
    bool p_star = false;
    bool radius = false;
    bool limit = false;
    bool ball_bounds = false;
    std::optional<double> delta;
    double eta = 0.25;
    double tol = 1e-10;
    std::string p = "2";

    // shared problem parameters
    std::string domain;
    std::size_t d = 0;
    std::size_t n = 0;
    std::string points;
    std::size_t samples = 0;
    std::size_t pairs = 0;
    std::size_t checks = 1000;
    std::size_t k = 3;

    // quad
    std::string family;
    unsigned j = 1;
    std::string algorithm;
    bool fd = false;
    std::optional<double> h;
    double eps0 = 0.1;
    std::string a_list;
    std::optional<double> b;
    std::optional<double> L;

    // bounds
    std::string bound;
    std::string d_list;
    std::string eps_list;
    double a = 1.0;
    double R = 0.5;
    double tail = 0.0;
    double L1 = 1.0;
    std::optional<double> diam;
    double c = 1.0;
    double rad = 0.5;
    double m = 1.0;
    std::optional<std::size_t> order;
    double alpha = 1.0;

    // classify
    std::string profile;
    std::optional<double> radius_ratio;
};

// A command's outcome: the JSON document, a CSV table, plot rows.
struct Report {
    Json doc;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<double>> plot;
    bool violated = false;
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            if constexpr (std::is_same_v<T, double>) {
                out.push_back(std::stod(item, &used));
            } else {
                out.push_back(static_cast<T>(std::stoull(item, &used)));
            }
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw PreconditionError(std::string("bad value in ") + what + ": " + item);
        }
    }
    if (out.empty()) throw PreconditionError(std::string(what) + " must not be empty");
    return out;
}

std::uint64_t require_seed(const Options& o) {
    if (!o.seed) throw PreconditionError("--seed is required for randomized subcommands");
    return *o.seed;
}

Json header_doc(const std::string& command) {
    Json doc;
    doc["schema"] = kSchema;
    doc["command"] = command;
    return doc;
}

void hull_point(Sampler& rng, const PointSet& ps, std::vector<double>& out) {
    std::vector<double> w(ps.size());
    rng.simplex(w);
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto p = ps.point(i);
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w[i] * p[t];
    }
}

void unit_direction(Sampler& rng, std::vector<double>& u) {
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (auto& v : u) {
            v = rng.normal();
            norm2 += v * v;
        }
    } while (norm2 == 0.0);
    const double s = 1.0 / std::sqrt(norm2);
    for (auto& v : u) v *= s;
}

double norm_diff(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
}

// A point at distance t from conv(ps): a random domain point is projected and
// the result is moved along the outward normal.
void normal_point(Sampler& rng, const DomainSpec& dom, WolfeSolver& solver, double t, std::vector<double>& out) {
    for (;;) {
        dom.sample(rng, out);
        const HullProjection proj = solver.project(out);
        if (proj.distance < 1e-9) continue;
        for (std::size_t s = 0; s < out.size(); ++s) {
            out[s] = proj.nearest[s] + t * (out[s] - proj.nearest[s]) / proj.distance;
        }
        return;
    }
}

// ---- constants -------------------------------------------------------------

Report cmd_constants(const Options& o) {
    Report r;
    r.doc = header_doc("constants");
    const bool all = !(o.gamma || o.gamma_tilde || o.p_star || o.radius || o.limit || o.ball_bounds);
    Json results = Json::object();
    r.header = {"name", "value", "pass"};
    constexpr double kThreshold = 7.0 / 8.0;

    if (all || o.gamma) {
        const double delta = o.delta.value_or(0.26);
        const GammaConstant g = gamma_constant(delta, o.eta);
        Json j = to_json(g);
        const double probe = profile_integral(4.5, delta, o.eta);
        j["probe_alpha"] = 4.5;
        j["probe_value"] = number(probe);
        j["threshold"] = kThreshold;
        j["pass"] = g.value < kThreshold;
        j["provenance"]["probe_value"] = "formula";
        r.violated |= !(g.value < kThreshold);
        results["gamma"] = j;
        r.rows.push_back({"gamma", fmt(g.value), fmt(g.value < kThreshold)});
        for (int i = 0; i <= 200; ++i) {
            const double alpha = 0.05 * i;
            r.plot.push_back({alpha, profile_integral(alpha, delta, o.eta)});
        }
    }
    if (all || o.gamma_tilde) {
        const double delta = o.delta.value_or(0.01);
        const GammaConstant g = gamma_tilde(delta);
        Json j = to_json(g);
        j["threshold"] = kThreshold;
        j["pass"] = g.value < kThreshold;
        r.violated |= !(g.value < kThreshold);
        results["gamma_tilde"] = j;
        r.rows.push_back({"gamma_tilde", fmt(g.value), fmt(g.value < kThreshold)});
    }
    if (all || o.p_star) {
        const double ps = solve_p_star(o.tol);
        results["p_star"] = {{"value", number(ps)},
                             {"tol", o.tol},
                             {"residual", number(p_star_residual(ps))},
                             {"provenance", {{"value", "solver"}, {"residual", "formula"}}}};
        r.rows.push_back({"p_star", fmt(ps), ""});
    }
    const LpExponent p = LpExponent::parse(o.p);
    const std::size_t d = o.d ? o.d : 20;
    if (all || o.radius) {
        const NormalizedRadius nr = lp_normalized_radius(p, d);
        results["radius"] = {{"p", p.to_string()},
                             {"d", d},
                             {"value", number(nr.value)},
                             {"ratio", number(nr.ratio)},
                             {"provenance", {{"value", "formula"}, {"ratio", "formula"}}}};
        r.rows.push_back({"radius", fmt(nr.value), ""});
    }
    if (all || o.limit) {
        const double lim = radius_limit_ratio(p);
        results["limit"] = {{"p", p.to_string()}, {"value", number(lim)}, {"provenance", {{"value", "formula"}}}};
        r.rows.push_back({"limit", fmt(lim), ""});
    }
    if (all || o.ball_bounds) {
        const double delta = o.delta.value_or(0.05);
        const BallVolumeBounds bb = ball_volume_bounds(d, delta);
        results["ball_bounds"] = {{"d", d},
                                  {"delta", number(delta)},
                                  {"log_exact", number(bb.log_exact)},
                                  {"log_crude", number(bb.log_crude)},
                                  {"log_refined", number(bb.log_refined)},
                                  {"provenance",
                                   {{"log_exact", "formula"}, {"log_crude", "formula"}, {"log_refined", "formula"}}}};
        r.rows.push_back({"ball_bounds.log_exact", fmt(bb.log_exact), ""});
        r.rows.push_back({"ball_bounds.log_crude", fmt(bb.log_crude), ""});
        r.rows.push_back({"ball_bounds.log_refined", fmt(bb.log_refined), ""});
    }
    r.doc["results"] = results;
    return r;
}

// ---- volume ----------------------------------------------------------------

PointSet load_points(const Options& o, const DomainSpec& dom, std::uint64_t seed) {
    if (!o.points.empty()) {
        std::ifstream in(o.points);
        if (!in) throw PreconditionError("cannot open points file " + o.points);
        PointSet ps = PointSet::read_csv(in);
        if (ps.dim() != dom.dim()) throw PreconditionError("points file dimension does not match --d");
        return ps;
    }
    if (o.n == 0) throw PreconditionError("--n or --points is required");
    return PointSet::sample(dom, o.n, o.point_seed.value_or(seed));
}

Report cmd_volume(const Options& o, const ExecConfig& exec) {
    const std::uint64_t seed = require_seed(o);
    if (o.d == 0) throw PreconditionError("--d is required");
    if (!o.delta) throw PreconditionError("--delta is required");
    const DomainSpec dom = DomainSpec::parse(o.domain.empty() ? "lp:2" : o.domain, o.d);
    const PointSet ps = load_points(o, dom, seed);
    const std::size_t N = o.samples ? o.samples : 200000;
    const VolumeEstimate est = mc_hull_neighborhood_volume(ps, dom, *o.delta, N, seed, exec);

    Report r;
    r.doc = header_doc("volume");
    r.doc["config"] = {{"domain", dom.label()},
                       {"d", o.d},
                       {"n", ps.size()},
                       {"delta", number(*o.delta)},
                       {"point_seed", o.point_seed.value_or(seed)}};
    r.doc["result"] = to_json(est);
    r.violated = !est.pass;
    r.header = {"domain", "d", "n", "delta", "samples", "seed", "mean", "half_width_95", "bound_log", "bound_source",
                "pass"};
    r.rows.push_back({dom.label(), fmt(o.d), fmt(ps.size()), fmt(*o.delta), fmt(N), std::to_string(seed), fmt(est.mean),
                      fmt(est.half_width_95), est.bound_log ? fmt(*est.bound_log) : "", to_string(est.bound_source),
                      fmt(est.pass)});
    r.plot.push_back({static_cast<double>(o.d), est.mean,
                      est.bound_log ? std::exp(*est.bound_log) : std::numeric_limits<double>::quiet_NaN()});
    return r;
}

// ---- fool-check ------------------------------------------------------------

struct Check {
    std::string name;
    double observed = 0.0;
    double bound = 0.0;
    std::size_t samples = 0;
    bool pass = true;
    std::vector<std::pair<std::string, double>> extra;
};

void emit_checks(Report& r, const std::vector<Check>& checks) {
    Json arr = Json::array();
    r.header = {"check", "observed", "bound", "samples", "pass"};
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const Check& c = checks[i];
        Json j;
        j["name"] = c.name;
        j["observed"] = number(c.observed);
        j["bound"] = number(c.bound);
        j["samples"] = c.samples;
        for (const auto& [k, v] : c.extra) j[k] = number(v);
        j["pass"] = c.pass;
        j["provenance"] = {{"observed", "monte_carlo"}, {"bound", "formula"}};
        arr.push_back(j);
        r.rows.push_back({c.name, fmt(c.observed), fmt(c.bound), fmt(c.samples), fmt(c.pass)});
        r.plot.push_back({static_cast<double>(i), c.observed, c.bound});
        r.violated |= !c.pass;
    }
    r.doc["checks"] = arr;
}

Report cmd_fool_check(const Options& o) {
    const std::uint64_t seed = require_seed(o);
    if (o.d == 0) throw PreconditionError("--d is required");
    const std::size_t d = o.d;
    const double delta = o.delta.value_or(1.0 / 200.0);
    const DomainSpec dom = DomainSpec::parse(o.domain.empty() ? "cube" : o.domain, d);
    const std::size_t n = o.n ? o.n : 8;
    const PointSet ps = PointSet::sample(dom, n, o.point_seed.value_or(seed));
    const FoolingFunction f = FoolingFunction::c1(ps, delta);
    const double reach = delta * std::sqrt(static_cast<double>(d));
    const double scale = reach * reach;
    const std::size_t pairs = o.pairs ? o.pairs : 10000;
    const std::size_t m = o.checks;
    WolfeSolver solver(ps);

    std::vector<double> x(d), y(d), u(d), v(d);
    std::vector<Check> checks;

    {
        Sampler rng(seed, 1);
        double lip = 0.0, grad_lip = 0.0;
        for (std::size_t i = 0; i < pairs; ++i) {
            normal_point(rng, dom, solver, 2.5 * reach * rng.uniform(), x);
            unit_direction(rng, v);
            const double step = 0.1 * reach * rng.uniform_open();
            for (std::size_t s = 0; s < d; ++s) y[s] = x[s] + step * v[s];
            const C1Value fx = f.value_and_gradient(x);
            const C1Value fy = f.value_and_gradient(y);
            const double dist = norm_diff(x, y);
            lip = std::max(lip, std::abs(fx.value - fy.value) / dist);
            grad_lip = std::max(grad_lip, norm_diff(fx.gradient, fy.gradient) / dist);
        }
        const double lip_bound = 2.0 / reach;
        const double grad_bound = 40.0 / scale;
        checks.push_back({"lipschitz", lip, lip_bound, pairs, lip <= lip_bound * (1.0 + 1e-8), {}});
        checks.push_back(
            {"gradient_lipschitz", grad_lip, grad_bound, pairs, grad_lip <= grad_bound * (1.0 + 1e-6), {}});
    }
    {
        Sampler rng(seed, 2);
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            hull_point(rng, ps, x);
            rng.ball(u, reach);
            for (std::size_t s = 0; s < d; ++s) x[s] += u[s];
            worst = std::max(worst, std::abs(f.value(x)));
        }
        checks.push_back({"zero_on_K_delta", worst, 0.0, m, worst == 0.0, {}});
    }
    {
        Sampler rng(seed, 3);
        double worst = 0.0;
        std::size_t accepted = 0, attempts = 0;
        while (accepted < m && attempts < 100 * m) {
            ++attempts;
            normal_point(rng, dom, solver, reach * (2.0 + 1e-6 + 4.0 * rng.uniform()), x);
            if (!(solver.distance(x) > 2.0 * reach * (1.0 + 1e-9))) continue;
            ++accepted;
            worst = std::max(worst, std::abs(f.value(x) - 1.0));
        }
        checks.push_back({"one_outside_K_2delta", worst, 0.0, accepted, accepted == m && worst == 0.0, {}});
    }
    {
        // Central differences at step h and h/2; points where the two disagree
        // sit on a kink of the projection and are skipped.
        Sampler rng(seed, 4);
        const double h = 1e-4 * reach;
        const double margin = 1e-3 * scale;
        const std::size_t target = std::max<std::size_t>(1, m / 5);
        std::size_t accepted = 0, skipped = 0, attempts = 0;
        double worst = 0.0;
        auto fd_grad = [&](double step, std::vector<double>& g) {
            std::vector<double> z = x;
            for (std::size_t s = 0; s < d; ++s) {
                z[s] = x[s] + step;
                const double plus = f.value(z);
                z[s] = x[s] - step;
                const double minus = f.value(z);
                z[s] = x[s];
                g[s] = (plus - minus) / (2.0 * step);
            }
        };
        std::vector<double> g1(d), g2(d);
        while (accepted < target && attempts < 100 * target) {
            ++attempts;
            normal_point(rng, dom, solver, reach * (1.0 + rng.uniform()), x);
            const double gap = solver.distance(x) - reach;
            if (gap <= 0.0) continue;
            const double phi = gap * gap;
            if (phi < margin || std::abs(phi - scale / 4.0) < margin || phi > scale - margin) continue;
            const C1Value exact = f.value_and_gradient(x);
            fd_grad(h, g1);
            fd_grad(0.5 * h, g2);
            const double gnorm = std::sqrt(std::inner_product(exact.gradient.begin(), exact.gradient.end(),
                                                              exact.gradient.begin(), 0.0));
            if (norm_diff(g1, g2) > 1e-7 * gnorm) {
                ++skipped;
                continue;
            }
            ++accepted;
            worst = std::max(worst, norm_diff(g1, exact.gradient) / gnorm);
        }
        checks.push_back({"gradient_vs_fd",
                          worst,
                          1e-5,
                          accepted,
                          accepted == target && worst <= 1e-5,
                          {{"skipped_near_kinks", static_cast<double>(skipped)}}});
    }

    Report r;
    r.doc = header_doc("fool-check");
    r.doc["config"] = {{"domain", dom.label()},
                       {"d", d},
                       {"n", ps.size()},
                       {"delta", number(delta)},
                       {"pairs", pairs},
                       {"seed", seed},
                       {"point_seed", o.point_seed.value_or(seed)}};
    emit_checks(r, checks);
    return r;
}

// ---- smooth-check ----------------------------------------------------------

Report cmd_smooth_check(const Options& o, const ExecConfig& exec) {
    const std::uint64_t seed = require_seed(o);
    const std::size_t d = o.d ? o.d : 5;
    const std::size_t n = o.n ? o.n : 8;
    const std::size_t k = o.k;
    const double delta = o.delta.value_or(0.05);
    const std::size_t N = o.samples ? o.samples : 4096;
    const std::size_t pairs = o.pairs ? o.pairs : 20;
    const DomainSpec dom = DomainSpec::parse(o.domain.empty() ? "cube" : o.domain, d);
    const PointSet ps = PointSet::sample(dom, n, o.point_seed.value_or(seed));
    const FoolingFunction f = FoolingFunction::smoothed(ps, delta, k);
    const AlphaSequence seq = *f.sequence();
    const double reach = delta * std::sqrt(static_cast<double>(d));
    WolfeSolver solver(ps);
    Sampler rng(seed, 1);
    std::vector<double> x(d), y(d), u(d);
    std::vector<Check> checks;

    {
        const double c = 0.37;
        const ScalarField hook = [c](std::span<const double>) { return c; };
        dom.sample(rng, x);
        const SmoothedValue sv = smoothed_eval(hook, seq, k, delta, x, N, seed, exec);
        checks.push_back({"constant_hook", std::abs(sv.mean - c), 0.0, N, sv.mean == c && sv.half_width_95 == 0.0,
                          {{"half_width_95", sv.half_width_95}}});
    }
    {
        std::vector<double> a(d);
        for (auto& v : a) v = rng.normal();
        const double b = rng.normal();
        const ScalarField hook = [a, b](std::span<const double> z) {
            double s = b;
            for (std::size_t i = 0; i < z.size(); ++i) s += a[i] * z[i];
            return s;
        };
        dom.sample(rng, x);
        const SmoothedValue sv = smoothed_eval(hook, seq, k, delta, x, N, seed, exec);
        const double err = std::abs(sv.mean - hook(x));
        const double sigma = sv.half_width_95 / 1.96;
        checks.push_back({"affine_hook", err, 3.0 * sigma, N, err <= 3.0 * sigma, {}});
    }
    {
        double worst = 0.0;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            worst = std::max(worst, std::abs(f.evaluate_smoothed(ps.point(i), N, seed, exec).mean));
        }
        checks.push_back({"zero_at_hull_points", worst, 0.0, ps.size(), worst == 0.0, {}});
    }
    {
        double worst = 0.0;
        std::size_t accepted = 0, attempts = 0;
        while (accepted < pairs && attempts < 100 * pairs) {
            ++attempts;
            normal_point(rng, dom, solver, reach * (3.0 + 1e-6 + 3.0 * rng.uniform()), x);
            if (!(solver.distance(x) > 3.0 * reach * (1.0 + 1e-9))) continue;
            ++accepted;
            worst = std::max(worst, std::abs(f.evaluate_smoothed(x, N, seed, exec).mean - 1.0));
        }
        checks.push_back({"one_beyond_K_3delta", worst, 0.0, accepted, accepted == pairs && worst == 0.0, {}});
    }
    {
        // Same seed at x and y: differences use common random numbers.
        const double lip = f.lipschitz();
        double worst_excess = -std::numeric_limits<double>::infinity();
        double worst_quotient = 0.0;
        for (std::size_t i = 0; i < pairs; ++i) {
            normal_point(rng, dom, solver, 3.0 * reach * rng.uniform(), x);
            unit_direction(rng, u);
            const double step = 0.5 * reach * rng.uniform_open();
            for (std::size_t s = 0; s < d; ++s) y[s] = x[s] + step * u[s];
            const SmoothedValue fx = f.evaluate_smoothed(x, N, seed, exec);
            const SmoothedValue fy = f.evaluate_smoothed(y, N, seed, exec);
            const double dist = norm_diff(x, y);
            const double sx = fx.half_width_95 / 1.96, sy = fy.half_width_95 / 1.96;
            const double allowed = lip * dist + 3.0 * std::hypot(sx, sy);
            const double diff = std::abs(fx.mean - fy.mean);
            worst_quotient = std::max(worst_quotient, diff / dist);
            worst_excess = std::max(worst_excess, diff - allowed);
        }
        checks.push_back({"smoothed_lipschitz",
                          worst_quotient,
                          lip,
                          pairs,
                          worst_excess <= 0.0,
                          {{"max_excess_over_allowance", worst_excess}}});
    }

    Report r;
    r.doc = header_doc("smooth-check");
    r.doc["config"] = {{"domain", dom.label()},
                       {"d", d},
                       {"n", ps.size()},
                       {"k", k},
                       {"delta", number(delta)},
                       {"samples", N},
                       {"seed", seed},
                       {"point_seed", o.point_seed.value_or(seed)}};
    emit_checks(r, checks);
    return r;
}

// ---- quad ------------------------------------------------------------------

Report cmd_quad(const Options& o, const ExecConfig& exec) {
    const std::uint64_t seed = require_seed(o);
    if (o.d == 0) throw PreconditionError("--d is required");
    const std::size_t d = o.d;
    const std::string family = o.family.empty() ? "sine" : o.family;
    const DomainSpec dom = DomainSpec::cube(d);
    const std::size_t N = o.samples ? o.samples : 200000;

    std::optional<FoolingFunction> fool;
    Integrand f;
    Json family_json;
    if (family == "sine") {
        std::vector<double> a;
        Sampler rng(seed, 1);
        if (!o.a_list.empty()) {
            a = parse_list<double>(o.a_list, "--a");
            if (a.size() != d) throw PreconditionError("--a must have d entries");
        } else {
            a.resize(d);
            for (auto& v : a) v = 2.0 * rng.uniform() - 1.0;
        }
        const double b = o.b.value_or(2.0 * std::numbers::pi * rng.uniform());
        f = sine_ridge(a, b, o.eps0);
        Json aj = Json::array();
        for (double v : a) aj.push_back(number(v));
        family_json = {{"name", "sine"}, {"a", aj}, {"b", number(b)}, {"eps0", number(o.eps0)}};
    } else if (family == "c0" || family == "c1") {
        const PointSet center = PointSet::from_rows({dom.center()});
        if (family == "c0") {
            const double L = o.L.value_or(1.0 / std::sqrt(static_cast<double>(d)));
            fool = FoolingFunction::c0(center, L);
            family_json = {{"name", "c0"}, {"L_d", number(L)}};
        } else {
            const double delta = o.delta.value_or(0.05);
            fool = FoolingFunction::c1(center, delta);
            family_json = {{"name", "c1"}, {"delta", number(delta)}};
        }
        f = fooling_integrand(*fool);
    } else {
        throw PreconditionError("unknown --family " + family);
    }
    if (o.fd) {
        f.analytic_partial = nullptr;
        f.analytic_gradient = nullptr;
    }

    const std::string algorithm = o.algorithm.empty() ? (family == "sine" ? "taylor" : "one_point") : o.algorithm;
    QuadratureResult q;
    if (algorithm == "taylor") {
        q = quad_taylor(f, dom, o.j, o.h, exec);
    } else if (algorithm == "one_point") {
        q = quad_one_point(f, dom);
    } else {
        throw PreconditionError("unknown --algorithm " + algorithm);
    }

    Json reference;
    double ref = 0.0, ref_sigma = 0.0;
    if (f.exact_integral) {
        ref = *f.exact_integral;
        reference = {{"value", number(ref)}, {"provenance", {{"value", "formula"}}}};
    } else {
        const McIntegral mc = reference_integral(f, dom, N, seed, exec);
        ref = mc.mean;
        ref_sigma = mc.half_width_95 / 1.96;
        reference = {{"value", number(mc.mean)},
                     {"half_width_95", number(mc.half_width_95)},
                     {"samples", N},
                     {"provenance", {{"value", "monte_carlo"}, {"half_width_95", "monte_carlo"}}}};
    }
    const double error = std::abs(q.value - ref);
    const double fd_tolerance = o.fd ? 1e-6 : 0.0;
    const double allowed = q.error_bound ? *q.error_bound + fd_tolerance + 3.0 * ref_sigma
                                         : std::numeric_limits<double>::infinity();

    Report r;
    r.doc = header_doc("quad");
    r.doc["config"] = {{"d", d}, {"j", o.j}, {"fd", o.fd}, {"seed", seed}};
    r.doc["family"] = family_json;
    r.doc["result"] = to_json(q);
    r.doc["reference"] = reference;
    r.doc["error"] = number(error);
    r.doc["allowed"] = number(allowed);
    r.doc["pass"] = error <= allowed;
    r.doc["provenance"] = {{"error", ref_sigma > 0.0 ? "monte_carlo" : "formula"}, {"allowed", "formula"}};
    r.violated = !(error <= allowed);
    r.header = {"family", "algorithm", "d", "value", "reference", "error", "error_bound", "evaluations_used", "pass"};
    r.rows.push_back({family, q.algorithm_label(), fmt(d), fmt(q.value), fmt(ref), fmt(error),
                      q.error_bound ? fmt(*q.error_bound) : "", fmt(q.evaluations_used), fmt(error <= allowed)});
    r.plot.push_back({static_cast<double>(q.order), error,
                      q.error_bound ? *q.error_bound : std::numeric_limits<double>::quiet_NaN()});
    return r;
}

// ---- bounds ----------------------------------------------------------------

BoundReport evaluate_bound(const Options& o, std::size_t d, double eps) {
    const std::string& b = o.bound;
    if (b == "lipschitz") return lb_lipschitz(eps, d, o.L.value_or(1.0), o.a);
    if (b == "lipgrad_cube") return lb_lipgrad_cube(eps, d);
    if (b == "higher") return lb_higher(eps, d, o.eta);
    if (b == "one_point_c0") return ub_one_point_c0(o.L.value_or(1.0), d, o.R, o.tail);
    if (b == "one_point_c1") {
        const double diam = o.diam.value_or(std::sqrt(static_cast<double>(d)));
        return ub_one_point_c1(o.L1, diam, std::make_pair(o.R, o.tail), d);
    }
    if (b == "taylor") return ub_taylor(o.j, o.L.value_or(1.0), d, o.R);
    if (b == "qpt") return qpt_bound(eps, d, o.c, o.a);
    if (b == "cor64") return cor64_bound(eps, d, o.rad);
    if (b == "not_uwt") return not_uwt_witness(o.m, o.order, o.alpha);
    throw PreconditionError("unknown --bound " + b);
}

Report cmd_bounds(const Options& o) {
    if (o.bound.empty()) throw PreconditionError("--bound is required");
    const auto ds = parse_list<std::size_t>(o.d_list.empty() ? "10" : o.d_list, "--d");
    const auto epss = parse_list<double>(o.eps_list.empty() ? "0.1" : o.eps_list, "--eps");
    Report r;
    r.doc = header_doc("bounds");
    r.doc["bound"] = o.bound;
    r.header = {"bound", "d", "eps", "log_value", "value", "theorem", "direction", "preconditions_met", "extras"};
    Json rows = Json::array();
    for (std::size_t d : ds) {
        for (double eps : epss) {
            const BoundReport br = evaluate_bound(o, d, eps);
            Json j = to_json(br);
            j["d"] = d;
            j["eps"] = number(eps);
            rows.push_back(j);
            std::string extras;
            for (const auto& [k, v] : br.extras) extras += (extras.empty() ? "" : ";") + k + "=" + fmt(v);
            r.rows.push_back({o.bound, fmt(d), fmt(eps), fmt(br.log_value), fmt(br.value()), br.theorem,
                              br.direction == Direction::lower ? "lower" : "upper", fmt(br.preconditions_met),
                              extras});
            r.plot.push_back({static_cast<double>(d), eps, br.log_value});
        }
    }
    r.doc["rows"] = rows;
    return r;
}

// ---- classify --------------------------------------------------------------

Report cmd_classify(const Options& o) {
    if (o.profile.empty()) throw PreconditionError("--profile is required");
    const SmoothnessProfile profile = SmoothnessProfile::parse(o.profile);
    const DomainFamily family = parse_domain_family(o.family.empty() ? "cube" : o.family);
    ClassifyParams params;
    params.radius_ratio = o.radius_ratio;
    const Verdict v = classify(profile, family, params);
    Report r;
    r.doc = header_doc("classify");
    r.doc["config"] = {{"profile", profile.to_string()}, {"family", to_string(family)}};
    const Json vj = to_json(v);
    for (const auto& [k, val] : vj.items()) r.doc[k] = val;
    r.header = {"verdict", "theorem", "d", "eps", "log_bound", "direction"};
    for (const auto& s : v.samples) {
        r.rows.push_back({to_string(v.kind), v.theorem, fmt(s.d), fmt(s.eps), fmt(s.log_bound),
                          s.direction == Direction::lower ? "lower" : "upper"});
        r.plot.push_back({static_cast<double>(s.d), s.eps, s.log_bound});
    }
    if (v.samples.empty()) r.rows.push_back({to_string(v.kind), v.theorem, "", "", "", ""});
    return r;
}

// ---- plumbing --------------------------------------------------------------

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

void merge_config(std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return;
    std::ifstream in(*path);
    if (!in) throw PreconditionError("cannot open config file " + *path);
    const std::vector<std::string> given = args;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw PreconditionError("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty() || key == "config") throw PreconditionError("bad config key: " + line);
        const std::string flag = "--" + key;
        if (!has_flag(given, flag)) args.push_back(flag + "=" + trim(line.substr(eq + 1)));
    }
}

void write_csv(std::ostream& os, const Report& r) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char ch : s) {
            if (ch == '"') q += '"';
            q += ch;
        }
        return q + "\"";
    };
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
        os << '\n';
    };
    line(r.header);
    for (const auto& row : r.rows) line(row);
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--point-seed", o.point_seed, "Seed for the random point set (default: --seed)");
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Integration tractability experiments", "curse-lab"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", o.config, "Flat key=value file; command-line flags take precedence");
    app.add_option("--threads", o.threads, "Worker threads (0: all cores)");
    app.add_option("--output", o.output, "Write the primary artifact here instead of stdout");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--plot-data", o.plot_data, "Whitespace-delimited plot data file");

    auto* constants = app.add_subcommand("constants", "Volume constants, critical exponent, radii");
    constants->add_flag("--gamma", o.gamma);
    constants->add_flag("--gamma-tilde", o.gamma_tilde);
    constants->add_flag("--p-star", o.p_star);
    constants->add_flag("--radius", o.radius);
    constants->add_flag("--limit", o.limit);
    constants->add_flag("--ball-bounds", o.ball_bounds);
    constants->add_option("--delta", o.delta);
    constants->add_option("--eta", o.eta);
    constants->add_option("--tol", o.tol);
    constants->add_option("--p", o.p, "lp exponent, or inf");
    constants->add_option("--d", o.d);

    auto* volume = app.add_subcommand("volume", "Monte Carlo hull-neighborhood volume against its bound");
    volume->add_option("--domain", o.domain, "cube, lp:<p>");
    volume->add_option("--d", o.d);
    volume->add_option("--n", o.n);
    volume->add_option("--points", o.points, "CSV file of points, one per row");
    volume->add_option("--delta", o.delta);
    volume->add_option("--samples", o.samples);
    add_common(volume, o);

    auto* fool = app.add_subcommand("fool-check", "Invariants of the C^1 fooling function");
    fool->add_option("--domain", o.domain);
    fool->add_option("--d", o.d);
    fool->add_option("--n", o.n);
    fool->add_option("--delta", o.delta);
    fool->add_option("--pairs", o.pairs);
    fool->add_option("--checks", o.checks, "Points per pointwise check");
    add_common(fool, o);

    auto* smooth = app.add_subcommand("smooth-check", "Statistical checks of the smoothed fooling function");
    smooth->add_option("--domain", o.domain);
    smooth->add_option("--d", o.d);
    smooth->add_option("--n", o.n);
    smooth->add_option("--k", o.k);
    smooth->add_option("--delta", o.delta);
    smooth->add_option("--samples", o.samples);
    smooth->add_option("--pairs", o.pairs);
    add_common(smooth, o);

    auto* quad = app.add_subcommand("quad", "One-point or Taylor quadrature error against its bound");
    quad->add_option("--family", o.family, "sine, c0 or c1");
    quad->add_option("--d", o.d);
    quad->add_option("--j", o.j);
    quad->add_option("--algorithm", o.algorithm, "one_point or taylor");
    quad->add_flag("--fd", o.fd, "Use finite differences instead of analytic derivatives");
    quad->add_option("--step", o.h, "Finite-difference step");
    quad->add_option("--eps0", o.eps0);
    quad->add_option("--a", o.a_list, "Comma-separated frequency vector");
    quad->add_option("--b", o.b);
    quad->add_option("--L", o.L);
    quad->add_option("--delta", o.delta);
    quad->add_option("--samples", o.samples);
    add_common(quad, o);

    auto* bounds = app.add_subcommand("bounds", "Evaluate a bound over a sweep of d and eps");
    bounds->add_option("--bound", o.bound,
                       "lipschitz, lipgrad_cube, higher, one_point_c0, one_point_c1, taylor, qpt, cor64, not_uwt");
    bounds->add_option("--d", o.d_list, "Comma-separated dimensions");
    bounds->add_option("--eps", o.eps_list, "Comma-separated tolerances");
    bounds->add_option("--L", o.L);
    bounds->add_option("--a", o.a);
    bounds->add_option("--eta", o.eta);
    bounds->add_option("--R", o.R);
    bounds->add_option("--tail", o.tail);
    bounds->add_option("--L1", o.L1);
    bounds->add_option("--diam", o.diam);
    bounds->add_option("--j", o.j);
    bounds->add_option("--c", o.c);
    bounds->add_option("--rad", o.rad);
    bounds->add_option("--m", o.m);
    bounds->add_option("--k", o.order);
    bounds->add_option("--alpha", o.alpha);

    auto* cls = app.add_subcommand("classify", "Tractability verdict for a smoothness profile");
    cls->add_option("--profile", o.profile, "k=<int|inf>;kind=..;L0=<rule>;...;tail=<rule>");
    cls->add_option("--family", o.family, "cube, small_radius, convex_P, convex");
    cls->add_option("--radius-ratio", o.radius_ratio);

    try {
        merge_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    ExecConfig exec{o.threads};
    try {
        Report r;
        std::string default_format = "json";
        if (*constants) r = cmd_constants(o);
        if (*volume) r = cmd_volume(o, exec);
        if (*fool) r = cmd_fool_check(o);
        if (*smooth) r = cmd_smooth_check(o, exec);
        if (*quad) r = cmd_quad(o, exec);
        if (*bounds) {
            r = cmd_bounds(o);
            default_format = "csv";
        }
        if (*cls) r = cmd_classify(o);

        std::ostringstream primary;
        if ((o.format.empty() ? default_format : o.format) == "csv") {
            write_csv(primary, r);
        } else {
            primary << r.doc.dump(2) << '\n';
        }
        if (o.output.empty()) {
            out << primary.str();
        } else {
            std::ofstream file(o.output, std::ios::binary);
            if (!file) throw PreconditionError("cannot write " + o.output);
            file << primary.str();
        }
        if (!o.plot_data.empty()) {
            std::ofstream plot(o.plot_data);
            if (!plot) throw PreconditionError("cannot write " + o.plot_data);
            for (const auto& row : r.plot) {
                for (std::size_t i = 0; i < row.size(); ++i) plot << (i ? " " : "") << fmt(row[i]);
                plot << '\n';
            }
        }
        if (r.violated) {
            err << "check failed: a bound or invariant was violated\n";
            return kExitViolated;
        }
        return kExitOk;
    } catch (const IterationLimitError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace curse::cli
