// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "curse/errors.hpp"
#include "curse/special.hpp"

namespace curse {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

const double kSmallRadius = std::sqrt(2.0 / (std::numbers::pi * std::numbers::e));

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_number(const std::string& text, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0') throw PreconditionError("bad number '" + text + "' for " + what);
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

void require_dim(std::size_t d, const char* who) {
    if (d < 1) throw DomainError(std::string(who) + ": d must be >= 1");
}

}  // namespace

//---------------------------------------------------------------------------//
// Profiles
//---------------------------------------------------------------------------//

double LipschitzRule::log_coefficient(std::size_t j) const {
    const double jj = static_cast<double>(j);
    double out = log_constant + jj * log_geometric;
    if (factorial_power != 0.0) out += factorial_power * std::lgamma(jj + 1.0 - factorial_offset);
    return out;
}

double LipschitzRule::log_value(std::size_t j, std::size_t d) const {
    require_dim(d, "LipschitzRule");
    return log_coefficient(j) - decay(j) * std::log(static_cast<double>(d));
}

LipschitzRule LipschitzRule::parse(const std::string& text) {
    LipschitzRule rule;
    if (trim(text).empty()) return rule;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw PreconditionError("profile rule: expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const double v = parse_number(trim(item.substr(eq + 1)), "profile rule key " + key);
        if (key == "c") {
            rule.log_constant = v;
        } else if (key == "a") {
            rule.log_geometric = v;
        } else if (key == "q") {
            rule.factorial_power = v;
        } else if (key == "off") {
            rule.factorial_offset = v;
        } else if (key == "r") {
            rule.rate = v;
        } else if (key == "s") {
            rule.rate_slope = v;
        } else {
            throw PreconditionError("profile rule: unknown key '" + key + "'");
        }
    }
    return rule;
}

std::string LipschitzRule::to_string() const {
    std::string out;
    auto add = [&](const char* key, double v) {
        if (v == 0.0) return;
        if (!out.empty()) out += ',';
        out += key;
        out += '=';
        out += format_number(v);
    };
    add("c", log_constant);
    add("a", log_geometric);
    add("q", factorial_power);
    add("off", factorial_offset);
    add("r", rate);
    add("s", rate_slope);
    return out;
}

namespace {

// lnGamma(j + 1 - offset) must be finite wherever a rule is used.
void check_offsets(const std::vector<LipschitzRule>& rules, const LipschitzRule* tail) {
    for (std::size_t j = 0; j < rules.size(); ++j) {
        if (!(rules[j].factorial_offset < static_cast<double>(j) + 1.0)) {
            throw PreconditionError("SmoothnessProfile: factorial offset of L" + std::to_string(j) + " must be < j + 1");
        }
    }
    if (tail && !(tail->factorial_offset < static_cast<double>(rules.size()) + 1.0)) {
        throw PreconditionError("SmoothnessProfile: tail factorial offset must be < (first tail order) + 1");
    }
}

}  // namespace

SmoothnessProfile SmoothnessProfile::finite(std::vector<LipschitzRule> rules, DerivativeKind kind) {
    if (rules.empty()) throw PreconditionError("SmoothnessProfile: a finite profile needs L_0");
    check_offsets(rules, nullptr);
    SmoothnessProfile p;
    p.rules_ = std::move(rules);
    p.kind_ = kind;
    return p;
}

SmoothnessProfile SmoothnessProfile::infinite(std::vector<LipschitzRule> rules, LipschitzRule tail,
                                              DerivativeKind kind) {
    check_offsets(rules, &tail);
    SmoothnessProfile p;
    p.rules_ = std::move(rules);
    p.tail_ = tail;
    p.kind_ = kind;
    return p;
}

SmoothnessProfile SmoothnessProfile::parse(const std::string& text) {
    std::optional<std::size_t> k;
    bool is_inf = false;
    bool have_k = false;
    DerivativeKind kind = DerivativeKind::directional;
    std::vector<std::pair<std::size_t, LipschitzRule>> given;
    std::optional<LipschitzRule> tail;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw PreconditionError("profile: expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (key == "k") {
            have_k = true;
            if (value == "inf") {
                is_inf = true;
            } else {
                const double v = parse_number(value, "k");
                if (v < 0 || v != std::floor(v) || v > 64) throw PreconditionError("profile: k must be 0..64 or inf");
                k = static_cast<std::size_t>(v);
            }
        } else if (key == "kind") {
            if (value == "directional") {
                kind = DerivativeKind::directional;
            } else if (value == "partial") {
                kind = DerivativeKind::partial;
            } else {
                throw PreconditionError("profile: kind must be directional or partial");
            }
        } else if (key == "tail") {
            tail = LipschitzRule::parse(value);
        } else if (key.size() > 1 && key[0] == 'L') {
            const double j = parse_number(key.substr(1), "profile order");
            if (j < 0 || j != std::floor(j) || j > 64) throw PreconditionError("profile: bad order '" + key + "'");
            given.emplace_back(static_cast<std::size_t>(j), LipschitzRule::parse(value));
        } else {
            throw PreconditionError("profile: unknown key '" + key + "'");
        }
    }
    if (!have_k) throw PreconditionError("profile: k is required");
    std::sort(given.begin(), given.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < given.size(); ++i) {
        if (given[i].first == given[i - 1].first) throw PreconditionError("profile: order given twice");
    }
    if (is_inf) {
        if (!tail) throw PreconditionError("profile: k=inf needs a tail rule");
        std::vector<LipschitzRule> rules;
        for (std::size_t i = 0; i < given.size(); ++i) {
            if (given[i].first != i) throw PreconditionError("profile: explicit orders must be 0, 1, ... without gaps");
            rules.push_back(given[i].second);
        }
        return infinite(std::move(rules), *tail, kind);
    }
    if (tail) {
        // A tail fills every order up to k that is not given explicitly.
        std::vector<LipschitzRule> rules(*k + 1, *tail);
        for (const auto& [j, r] : given) {
            if (j > *k) throw PreconditionError("profile: order above k");
            rules[j] = r;
        }
        return finite(std::move(rules), kind);
    }
    if (given.size() != *k + 1) throw PreconditionError("profile: finite k needs L0..Lk");
    std::vector<LipschitzRule> rules;
    for (std::size_t i = 0; i < given.size(); ++i) {
        if (given[i].first != i) throw PreconditionError("profile: finite k needs L0..Lk");
        rules.push_back(given[i].second);
    }
    return finite(std::move(rules), kind);
}

std::string SmoothnessProfile::to_string() const {
    std::string out = "k=";
    out += is_infinite() ? std::string("inf") : std::to_string(rules_.size() - 1);
    out += kind_ == DerivativeKind::partial ? ";kind=partial" : ";kind=directional";
    for (std::size_t j = 0; j < rules_.size(); ++j) out += ";L" + std::to_string(j) + "=" + rules_[j].to_string();
    if (tail_) out += ";tail=" + tail_->to_string();
    return out;
}

std::optional<std::size_t> SmoothnessProfile::k() const noexcept {
    if (is_infinite()) return std::nullopt;
    return rules_.size() - 1;
}

const LipschitzRule& SmoothnessProfile::rule(std::size_t j) const {
    if (j < rules_.size()) return rules_[j];
    if (tail_) return *tail_;
    throw PreconditionError("SmoothnessProfile: order " + std::to_string(j) + " exceeds k");
}

SmoothnessProfile SmoothnessProfile::to_directional() const {
    SmoothnessProfile out = *this;
    if (kind_ == DerivativeKind::directional) return out;
    for (std::size_t j = 0; j < out.rules_.size(); ++j) out.rules_[j].rate -= 0.5 * static_cast<double>(j);
    if (out.tail_) out.tail_->rate_slope -= 0.5;
    out.kind_ = DerivativeKind::directional;
    return out;
}

SmoothnessProfile SmoothnessProfile::scaled(double log_factor) const {
    SmoothnessProfile out = *this;
    for (auto& r : out.rules_) r.log_constant += log_factor;
    if (out.tail_) out.tail_->log_constant += log_factor;
    return out;
}

//---------------------------------------------------------------------------//
// Closed-form bounds
//---------------------------------------------------------------------------//

double BoundReport::value() const { return std::exp(log_value); }

BoundReport lb_lipschitz(double eps, std::size_t d, double L_d, double a) {
    require_dim(d, "lb_lipschitz");
    if (!(L_d > 0.0)) throw DomainError("lb_lipschitz: L_d must be > 0");
    BoundReport r;
    r.theorem = "lipschitz_lower";
    r.direction = Direction::lower;
    if (!(a >= 1.0)) {
        r.preconditions_met = false;
        r.explanation = "requires a >= 1";
        r.log_value = -kInf;
        return r;
    }
    if (!(eps > 0.0 && eps < 1.0 / a)) {
        r.preconditions_met = false;
        r.explanation = "requires eps in (0, 1/a)";
        r.log_value = -kInf;
        return r;
    }
    const double dd = static_cast<double>(d);
    r.explanation = "(1 - a eps) (a L_d sqrt(d) / (3 sqrt(2 e pi)))^d";
    r.log_value = std::log1p(-a * eps) +
                  dd * std::log(a * L_d * std::sqrt(dd) / (3.0 * std::sqrt(2.0 * std::numbers::e * std::numbers::pi)));
    return r;
}

BoundReport lb_lipgrad_cube(double eps, std::size_t d) {
    require_dim(d, "lb_lipgrad_cube");
    if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("lb_lipgrad_cube: eps must lie in [0, 1]");
    BoundReport r;
    r.theorem = "gradient_cube_lower";
    r.direction = Direction::lower;
    const double dd = static_cast<double>(d);
    r.preconditions_met = eps > 0.0 && eps < 1.0;
    r.explanation = r.preconditions_met ? "(1 - eps)/(d + 1) (8/7)^d for L_0 = 400/sqrt(d), L_1 = 1.6e6/d"
                                        : "boundary value outside eps in (0, 1)";
    r.log_value = std::log1p(-eps) - std::log(dd + 1.0) + dd * std::log(8.0 / 7.0);
    return r;
}

BoundReport lb_higher(double eps, std::size_t d, double eta) {
    require_dim(d, "lb_higher");
    if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("lb_higher: eps must lie in [0, 1)");
    if (!(eta > 0.0)) throw DomainError("lb_higher: eta must be > 0");
    BoundReport r;
    r.theorem = "smoothed_lower";
    r.direction = Direction::lower;
    r.preconditions_met = eta > 1.0;
    r.explanation = r.preconditions_met ? "(1 - eps) eta^d" : "requires eta > 1";
    r.log_value = std::log1p(-eps) + static_cast<double>(d) * std::log(eta);
    return r;
}

BoundReport ub_one_point_c0(double L_d, std::size_t d, double R, double tail) {
    require_dim(d, "ub_one_point_c0");
    if (!(L_d >= 0.0 && R >= 0.0 && tail >= 0.0)) throw DomainError("ub_one_point_c0: arguments must be >= 0");
    BoundReport r;
    r.theorem = "one_point_lipschitz";
    r.direction = Direction::upper;
    r.explanation = "R L_d sqrt(d) + 2 tail";
    r.log_value = std::log(R * L_d * std::sqrt(static_cast<double>(d)) + 2.0 * tail);
    return r;
}

BoundReport ub_one_point_c1(double L1, double diam, std::optional<std::pair<double, double>> radius_tail,
                            std::size_t d) {
    if (!(L1 >= 0.0 && diam >= 0.0)) throw DomainError("ub_one_point_c1: arguments must be >= 0");
    BoundReport r;
    r.direction = Direction::upper;
    if (!radius_tail) {
        r.theorem = "one_point_gradient";
        r.explanation = "L_1 diam^2";
        r.log_value = std::log(L1 * diam * diam);
        return r;
    }
    require_dim(d, "ub_one_point_c1");
    const auto [R, tail] = *radius_tail;
    if (!(R >= 0.0 && tail >= 0.0)) throw DomainError("ub_one_point_c1: R and tail must be >= 0");
    r.theorem = "one_point_gradient_tail";
    r.explanation = "R^2 L_1 d + 2 tail";
    r.log_value = std::log(R * R * L1 * static_cast<double>(d) + 2.0 * tail);
    return r;
}

BoundReport ub_taylor(std::size_t j, double L_jd, std::size_t d, double R) {
    require_dim(d, "ub_taylor");
    if (!(L_jd >= 0.0 && R > 0.0)) throw DomainError("ub_taylor: need L >= 0 and R > 0");
    const double jj = static_cast<double>(j);
    BoundReport r;
    r.theorem = "taylor_upper";
    r.direction = Direction::upper;
    r.explanation = "R^{j+1}/j! L_{j,d} d^{(j+1)/2}";
    r.log_value = (jj + 1.0) * std::log(R) - log_factorial(jj) + std::log(L_jd) +
                  0.5 * (jj + 1.0) * std::log(static_cast<double>(d));
    return r;
}

BoundReport qpt_bound(double eps, std::size_t d, double c, double a) {
    require_dim(d, "qpt_bound");
    if (!(a > 1.0)) throw DomainError("qpt_bound: a must be > 1");
    if (!(c > 0.0)) throw DomainError("qpt_bound: c must be > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("qpt_bound: eps must lie in (0, 1)");
    const double ld = 1.0 + std::log(static_cast<double>(d));
    // Guard against log ratios landing a hair above an integer.
    const double steps = std::log(c / eps) / std::log(a);
    const double k_eps = std::max(0.0, std::ceil(steps - 1e-12 * std::max(1.0, std::abs(steps))));
    BoundReport r;
    r.theorem = "quasi_polynomial_upper";
    r.direction = Direction::upper;
    r.explanation = k_eps == 0.0 ? "eps >= c: one evaluation suffices" : "ln n <= k_eps (1 + ln d)";
    r.log_value = k_eps * ld;
    r.extras = {{"k_eps", k_eps},
                {"envelope", (1.0 + std::log(c)) * (1.0 + 1.0 / std::log(a)) * (1.0 - std::log(eps)) * ld}};
    return r;
}

BoundReport cor64_bound(double eps, std::size_t d, double rad) {
    require_dim(d, "cor64_bound");
    if (!(rad > 0.0)) throw DomainError("cor64_bound: rad must be > 0");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("cor64_bound: eps must lie in (0, 1)");
    BoundReport r;
    r.theorem = "unit_bound_taylor";
    r.direction = Direction::upper;
    const double e2 = std::exp(2.0) * rad;
    const double lg = std::log(rad / eps);
    r.explanation = e2 >= lg ? "(1 + ln d) e^2 rad" : "(1 + ln d) ln(rad/eps)";
    r.log_value = (1.0 + std::log(static_cast<double>(d))) * std::max(e2, lg);
    return r;
}

BoundReport not_uwt_witness(double m, std::optional<std::size_t> k, double alpha) {
    if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("not_uwt_witness: m must be finite and > 0");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("not_uwt_witness: alpha must lie in (0, 1]");
    BoundReport r;
    r.theorem = "uniform_weak_lower";
    r.direction = Direction::lower;
    if (!k) {
        r.preconditions_met = false;
        r.explanation = "requires finite smoothness k";
        r.log_value = -kInf;
        return r;
    }
    r.extras = {{"eps_sequence_scale", 0.5}, {"eps_sequence_power", -m}};
    const double am = alpha * m;
    if (am < 1.0 - kTol) {
        r.explanation = "denominator grows sublinearly; ratio diverges";
        r.log_value = kInf;
    } else if (am <= 1.0 + kTol) {
        const double lim = std::numbers::ln2 / (std::pow(2.0, alpha) + (alpha >= 1.0 - kTol ? 1.0 : 0.0));
        r.explanation = "limit ln 2 / (2^alpha + [alpha = 1])";
        r.log_value = std::log(lim);
    } else {
        r.preconditions_met = false;
        r.explanation = "alpha m > 1: ratio tends to 0, inconclusive";
        r.log_value = -kInf;
    }
    return r;
}

//---------------------------------------------------------------------------//
// Classifier
//---------------------------------------------------------------------------//

DomainFamily parse_domain_family(const std::string& text) {
    if (text == "cube") return DomainFamily::cube;
    if (text == "small_radius") return DomainFamily::small_radius;
    if (text == "convex_P") return DomainFamily::convex_P;
    if (text == "convex") return DomainFamily::convex;
    throw PreconditionError("unknown domain family '" + text + "' (cube, small_radius, convex_P, convex)");
}

std::string to_string(DomainFamily family) {
    switch (family) {
        case DomainFamily::cube:
            return "cube";
        case DomainFamily::small_radius:
            return "small_radius";
        case DomainFamily::convex_P:
            return "convex_P";
        case DomainFamily::convex:
            break;
    }
    return "convex";
}

std::string to_string(VerdictKind kind) {
    switch (kind) {
        case VerdictKind::curse:
            return "curse";
        case VerdictKind::no_curse:
            return "no_curse";
        case VerdictKind::QPT:
            return "QPT";
        case VerdictKind::WT:
            return "WT";
        case VerdictKind::UWT:
            return "UWT";
        case VerdictKind::not_UWT:
            return "not_UWT";
        case VerdictKind::indeterminate_gap:
            break;
    }
    return "indeterminate_gap";
}

namespace {

// Threshold s0 + s1 j on the decay exponent of L_{j,d}.
struct Threshold {
    double s0;
    double s1;

    double at(std::size_t j) const noexcept { return s0 + s1 * static_cast<double>(j); }
};

// decay(j) - threshold(j) as a function of j on the tail.
struct Gap {
    double at_start;
    double slope;
};

Gap tail_gap(const LipschitzRule& tail, std::size_t start, Threshold t) {
    return {tail.decay(start) - t.at(start), tail.rate_slope - t.s1};
}

// For every j in [from, k]: decay(j) <= threshold(j), i.e. limsup L_{j,d} d^{t_j} > 0.
bool all_at_most(const SmoothnessProfile& p, std::size_t from, Threshold t) {
    const auto& rules = p.explicit_rules();
    for (std::size_t j = from; j < rules.size(); ++j) {
        if (rules[j].decay(j) > t.at(j) + kTol) return false;
    }
    if (!p.tail()) return true;
    const Gap g = tail_gap(*p.tail(), std::max(from, rules.size()), t);
    return g.slope <= kTol && g.at_start <= kTol;
}

// For some j in [from, k]: decay(j) > threshold(j), i.e. lim L_{j,d} d^{t_j} = 0.
std::optional<std::size_t> first_above(const SmoothnessProfile& p, std::size_t from, Threshold t) {
    const auto& rules = p.explicit_rules();
    for (std::size_t j = from; j < rules.size(); ++j) {
        if (rules[j].decay(j) > t.at(j) + kTol) return j;
    }
    if (!p.tail()) return std::nullopt;
    const std::size_t start = std::max(from, rules.size());
    const Gap g = tail_gap(*p.tail(), start, t);
    if (g.at_start > kTol) return start;
    if (g.slope > kTol) {
        const double steps = std::floor((kTol - g.at_start) / g.slope) + 1.0;
        return start + static_cast<std::size_t>(std::max(0.0, steps));
    }
    return std::nullopt;
}

// For every j in [from, k]: decay(j) >= threshold(j).
bool all_at_least(const SmoothnessProfile& p, std::size_t from, Threshold t) {
    const auto& rules = p.explicit_rules();
    for (std::size_t j = from; j < rules.size(); ++j) {
        if (rules[j].decay(j) < t.at(j) - kTol) return false;
    }
    if (!p.tail()) return true;
    const Gap g = tail_gap(*p.tail(), std::max(from, rules.size()), t);
    return g.slope >= -kTol && g.at_start >= -kTol;
}

// Tail factorial growth at most j! times a geometric factor beaten by 1/R.
bool tail_factorial_ok(const LipschitzRule& tail, double R) {
    if (tail.factorial_power < 1.0 - kTol) return true;
    if (tail.factorial_power > 1.0 + kTol) return false;
    return tail.log_geometric + std::log(R) < -kTol;
}

// Every d-free coefficient <= 0, i.e. L_{j,d} <= 1 once the decays are
// non-negative. Gives up (false) when the maximum lies beyond the budget.
bool coefficients_at_most_zero(const SmoothnessProfile& p) {
    for (std::size_t j = 0; j < p.explicit_rules().size(); ++j) {
        if (p.explicit_rules()[j].log_coefficient(j) > kTol) return false;
    }
    if (!p.tail()) return true;
    const LipschitzRule& t = *p.tail();
    std::size_t j = p.explicit_rules().size();
    double value = t.log_coefficient(j);
    if (value > kTol) return false;
    if (t.factorial_power > kTol) return false;
    if (t.factorial_power >= -kTol) return t.log_geometric <= kTol;
    // q < 0: increments a + q ln(j + 1 - off) decrease; walk until they turn negative.
    constexpr std::size_t kBudget = 10000000;
    for (std::size_t step = 0; step < kBudget; ++step, ++j) {
        const double inc = t.log_geometric + t.factorial_power * std::log(static_cast<double>(j) + 1.0 - t.factorial_offset);
        if (inc <= 0.0) return true;
        value += inc;
        if (value > kTol) return false;
    }
    return false;
}

// ln limsup_d L_{j,d} d^{s}: the coefficient if the decay sits on the
// threshold, +inf if below it.
double log_limsup(const LipschitzRule& rule, std::size_t j, double s) {
    if (rule.decay(j) < s - kTol) return kInf;
    return rule.log_coefficient(j);
}

struct CurseWitness {
    double log_a = 0.0;
    double delta = 0.0;
    double base = 2.0;
    bool poly_factor = false;  // bound carries an extra 1/(d+1)
    bool has_base = true;
};

double max_log_ratio(const SmoothnessProfile& p, std::size_t kmax, const std::vector<double>& log_star) {
    double out = 0.0;
    for (std::size_t j = 0; j <= kmax && j < log_star.size(); ++j) {
        const double s = j == 0 ? 0.5 : 1.0;
        const double lim = log_limsup(p.rule(j), j, s);
        if (lim == kInf) continue;
        out = std::max(out, log_star[j] - lim);
    }
    return out;
}

std::vector<double> smoothed_log_star(double delta, std::size_t k) {
    std::vector<double> out{std::log(2.0 / delta)};
    for (std::size_t j = 1; j <= k; ++j) {
        out.push_back(std::log(40.0 / (delta * delta)) +
                      static_cast<double>(j - 1) * std::log(static_cast<double>(k - 1) / delta));
    }
    return out;
}

CurseWitness curse_witness(const SmoothnessProfile& p, DomainFamily family, const ClassifyParams& params) {
    CurseWitness w;
    const std::optional<std::size_t> k = p.k();
    if (k && *k == 0) {
        const double lim = log_limsup(p.rule(0), 0, 0.5);
        const double need = std::log(6.0 * std::sqrt(2.0 * std::numbers::e * std::numbers::pi));
        w.log_a = lim == kInf ? 0.0 : std::max(0.0, need - lim);
        w.base = 2.0;
        return w;
    }
    const bool cube = family == DomainFamily::cube;
    double R = 0.5;
    if (!cube) {
        if (!params.radius_ratio) {
            w.has_base = false;
            return w;
        }
        R = *params.radius_ratio;
    }
    const double m = (k && *k == 1) ? 2.0 : 3.0;
    if (cube) {
        w.delta = (k && *k == 1) ? 1.0 / 200.0 : 1.0 / 300.0;
        w.base = 8.0 / 7.0;
        w.poly_factor = true;
    } else {
        w.delta = (kSmallRadius - R) / (4.0 * m);
        w.base = 2.0 * kSmallRadius / (R + kSmallRadius);
    }
    if (k) {
        std::vector<double> star;
        if (*k == 1) {
            star = {std::log(2.0 / w.delta), std::log(40.0 / (w.delta * w.delta))};
        } else {
            star = smoothed_log_star(w.delta, *k);
        }
        w.log_a = max_log_ratio(p, *k, star);
        return w;
    }
    // Infinite order: compare against the truncated-series profile with a
    // factorial power strictly between 1 and the tail's.
    const double q = p.tail()->factorial_power;
    const double eta = std::min(1.0, 0.5 * (q - 1.0));
    const double log_c_eta = -std::log(riemann_zeta(1.0 + eta));
    auto log_star = [&](std::size_t j) {
        if (j == 0) return std::log(2.0 / w.delta);
        const double jj = static_cast<double>(j);
        return std::log(40.0) - (1.0 + jj) * std::log(w.delta) + (1.0 - jj) * log_c_eta + (1.0 + eta) * std::lgamma(jj);
    };
    const std::size_t first_tail = p.explicit_rules().size();
    const std::size_t scan = first_tail + 1000;
    double best = 0.0;
    for (std::size_t j = 0; j <= scan; ++j) {
        const double lim = log_limsup(p.rule(j), j, j == 0 ? 0.5 : 1.0);
        if (lim != kInf) best = std::max(best, log_star(j) - lim);
    }
    const LipschitzRule& t = *p.tail();
    const bool on_threshold = std::abs(t.rate_slope) <= kTol && std::abs(t.decay(scan) - 1.0) <= kTol;
    if (on_threshold) {
        // Increment of the log ratio from j to j+1; eventually decreasing
        // because the tail's factorial power exceeds 1 + eta.
        auto step = [&](double x) {
            return -std::log(w.delta) - log_c_eta + (1.0 + eta) * std::log(x) - t.log_geometric -
                   t.factorial_power * std::log(x + 1.0 - t.factorial_offset);
        };
        double lo = static_cast<double>(scan);
        if (step(lo) > 0.0) {
            double hi = 2.0 * lo;
            while (step(hi) > 0.0) {
                if (hi > 1e300) {
                    w.log_a = kInf;
                    return w;
                }
                hi *= 2.0;
            }
            for (int it = 0; it < 200 && hi - lo > 1.0; ++it) {
                const double mid = 0.5 * (lo + hi);
                (step(mid) > 0.0 ? lo : hi) = mid;
            }
            const double jj = std::ceil(lo);
            const double star = std::log(40.0) - (1.0 + jj) * std::log(w.delta) + (1.0 - jj) * log_c_eta +
                                (1.0 + eta) * std::lgamma(jj);
            const double coef = t.log_constant + jj * t.log_geometric +
                                t.factorial_power * std::lgamma(jj + 1.0 - t.factorial_offset);
            best = std::max(best, star - coef);
        }
    }
    w.log_a = best;
    return w;
}

std::vector<BoundSample> lower_samples(const CurseWitness& w) {
    std::vector<BoundSample> out;
    if (!w.has_base || !std::isfinite(w.log_a)) return out;
    const double a = std::exp(w.log_a);
    const double eps = 1.0 / (4.0 * a);
    for (std::size_t d : {10u, 100u, 1000u}) {
        const double dd = static_cast<double>(d);
        double lb = std::log1p(-a * eps) + dd * std::log(w.base);
        if (w.poly_factor) lb -= std::log(dd + 1.0);
        out.push_back({d, eps, lb, Direction::lower});
    }
    return out;
}

void add_curse(Verdict& v, const CurseWitness& w) {
    v.kind = VerdictKind::curse;
    if (!w.has_base) {
        v.explanation += "; supply radius_ratio for explicit curse constants";
        return;
    }
    v.witness = {{"log_a", w.log_a},
                 {"a", std::exp(w.log_a)},
                 {"eps0", std::exp(-w.log_a) / 2.0},
                 {"c", 0.5},
                 {"gamma", w.base - 1.0},
                 {"base", w.base}};
    if (w.delta > 0.0) v.witness.emplace_back("delta", w.delta);
    if (w.poly_factor) v.witness.emplace_back("poly_factor_degree", 1.0);
    v.samples = lower_samples(w);
}

std::string order_label(std::size_t j) { return "j=" + std::to_string(j); }

Verdict classify_finite(const SmoothnessProfile& given, const SmoothnessProfile& upper, std::size_t k,
                        DomainFamily family, const ClassifyParams& params) {
    const bool partial = given.kind() == DerivativeKind::partial;
    const bool small = family == DomainFamily::cube || family == DomainFamily::small_radius;

    const bool curse_cond = given.rule(0).decay(0) <= 0.5 + kTol && all_at_most(given, 1, {1.0, 0.0});
    const auto fast = first_above(upper, 0, {0.5, 0.5});

    Verdict v;
    v.implied = {VerdictKind::not_UWT};
    if (k == 0) {
        v.theorem = "lipschitz_dichotomy";
    } else if (k == 1 && !partial) {
        v.theorem = "gradient_dichotomy";
    } else {
        v.theorem = partial ? "higher_order_partial" : "higher_order";
    }

    if (curse_cond && (small || k == 0)) {
        v.explanation = "limsup L_0 sqrt(d) > 0 and limsup L_j d > 0 for j = 1..k";
        add_curse(v, curse_witness(given, family, params));
        return v;
    }
    if (fast) {
        const bool k0_needs_p = k == 0 && family == DomainFamily::convex;
        if (!k0_needs_p) {
            v.kind = VerdictKind::no_curse;
            v.explanation = "lim L_j d^{(j+1)/2} = 0 at " + order_label(*fast);
            v.witness = {{"j", static_cast<double>(*fast)}};
            for (std::size_t d : {10u, 100u, 1000u}) {
                const double jj = static_cast<double>(*fast);
                v.samples.push_back({d, 0.1, jj * (1.0 + std::log(static_cast<double>(d))), Direction::upper});
            }
            return v;
        }
    }
    if (small) {
        v.kind = VerdictKind::indeterminate_gap;
        v.explanation = "between the sufficient curse condition and the necessary one";
        return v;
    }
    throw UnsupportedCombination("classify: no result covers k=" + std::to_string(k) + " on family " +
                                 to_string(family) + " for this profile");
}

Verdict classify_infinite(const SmoothnessProfile& given, const SmoothnessProfile& upper, DomainFamily family,
                          const ClassifyParams& params) {
    const bool small = family == DomainFamily::cube || family == DomainFamily::small_radius;
    std::optional<double> R;
    if (family == DomainFamily::cube) {
        R = 0.5;
    } else if (params.radius_ratio) {
        R = *params.radius_ratio;
    } else if (family == DomainFamily::small_radius) {
        R = 0.5;
    }

    Verdict v;
    if (small && given.tail()->factorial_power > 1.0 + kTol && given.rule(0).decay(0) <= 0.5 + kTol &&
        all_at_most(given, 1, {1.0, 0.0})) {
        v.theorem = "infinite_order_lower";
        v.explanation = "limsup L_0 sqrt(d) > 0 and L_j d >= c (j!)^{1+eta} along a common subsequence";
        add_curse(v, curse_witness(given, family, params));
        return v;
    }

    const LipschitzRule& tail = *upper.tail();
    if (R && all_at_least(upper, 1, {0.5, 0.5}) && tail_factorial_ok(tail, *R)) {
        v.kind = VerdictKind::QPT;
        v.theorem = "quasi_polynomial_upper";
        v.explanation = "L_j <= c a^{-j} j! R^{-j-1} d^{-(j+1)/2} for all j, d";
        v.implied = {VerdictKind::UWT, VerdictKind::WT, VerdictKind::no_curse};
        // a halfway to the admissible limit; c the supremum of the ratio.
        const double log_gap = tail.factorial_power < 1.0 - kTol ? std::log(2.0) : -0.5 * (tail.log_geometric + std::log(*R));
        const double log_a = std::max(log_gap, 1e-3);
        double log_c = -kInf;
        for (std::size_t j = 1; j <= upper.explicit_rules().size() + 20000; ++j) {
            const double jj = static_cast<double>(j);
            const double lc = upper.rule(j).log_coefficient(j) + jj * log_a - std::lgamma(jj + 1.0) + (jj + 1.0) * std::log(*R);
            log_c = std::max(log_c, lc);
        }
        const double c = std::max(std::exp(log_c), 1.0);
        v.witness = {{"R", *R}, {"a", std::exp(log_a)}, {"c", c}};
        for (std::size_t d : {10u, 100u, 1000u}) {
            for (double eps : {0.1, 0.01}) {
                v.samples.push_back({d, eps, qpt_bound(eps, d, c, std::exp(log_a)).log_value, Direction::upper});
            }
        }
        return v;
    }
    if (R && tail.rate_slope >= 0.5 - kTol && tail_factorial_ok(tail, *R)) {
        v.kind = VerdictKind::UWT;
        v.theorem = "uniform_weak_upper";
        v.explanation = "decay deficit against d^{-(j+1)/2} bounded, absorbed by c_d = d^m";
        v.implied = {VerdictKind::WT};
        v.witness = {{"R", *R}};
        return v;
    }
    if (R && all_at_least(upper, 0, {0.0, 0.0}) && coefficients_at_most_zero(upper)) {
        v.kind = VerdictKind::WT;
        v.theorem = "unit_bound_weak";
        v.explanation = "L_{j,d} <= 1 for all j, d and rad(D_d) = O(sqrt(d))";
        v.witness = {{"R", *R}};
        for (std::size_t d : {10u, 100u, 1000u}) {
            const double rad = *R * std::sqrt(static_cast<double>(d));
            for (double eps : {0.1, 0.01}) {
                v.samples.push_back({d, eps, cor64_bound(eps, d, rad).log_value, Direction::upper});
            }
        }
        return v;
    }
    if (const auto fast = first_above(upper, 0, {0.5, 0.5})) {
        v.kind = VerdictKind::no_curse;
        v.theorem = "infinite_order_upper";
        v.explanation = "lim L_j d^{(j+1)/2} = 0 at " + order_label(*fast);
        v.witness = {{"j", static_cast<double>(*fast)}};
        for (std::size_t d : {10u, 100u, 1000u}) {
            const double jj = static_cast<double>(*fast);
            v.samples.push_back({d, 0.1, jj * (1.0 + std::log(static_cast<double>(d))), Direction::upper});
        }
        return v;
    }
    if (small) {
        v.kind = VerdictKind::indeterminate_gap;
        v.theorem = "infinite_order_lower";
        v.explanation = "factorial growth between the known upper and lower conditions";
        return v;
    }
    throw UnsupportedCombination("classify: no result covers k=inf on family " + to_string(family) +
                                 " for this profile");
}

}  // namespace

Verdict classify(const SmoothnessProfile& profile, DomainFamily family, const ClassifyParams& params) {
    if (params.radius_ratio) {
        const double R = *params.radius_ratio;
        if (!(R > 0.0)) throw PreconditionError("classify: radius_ratio must be > 0");
        if (family == DomainFamily::small_radius && !(R < kSmallRadius)) {
            throw PreconditionError("classify: small_radius needs radius_ratio < sqrt(2/(pi e))");
        }
    }
    const SmoothnessProfile upper = profile.to_directional();
    if (const auto k = profile.k()) return classify_finite(profile, upper, *k, family, params);
    return classify_infinite(profile, upper, family, params);
}

}  // namespace curse
