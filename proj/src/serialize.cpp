// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/serialize.hpp"

#include <cmath>

namespace curse {

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

namespace {

std::string direction_name(Direction d) { return d == Direction::lower ? "lower" : "upper"; }

}  // namespace

Json to_json(const VolumeEstimate& v) {
    Json j;
    j["mean"] = number(v.mean);
    j["half_width_95"] = number(v.half_width_95);
    j["samples"] = v.samples;
    j["seed"] = v.seed;
    j["bound_log"] = v.bound_log ? number(*v.bound_log) : Json(nullptr);
    j["bound_source"] = to_string(v.bound_source);
    j["pass"] = v.pass;
    j["provenance"] = {{"mean", "monte_carlo"},
                       {"half_width_95", "monte_carlo"},
                       {"bound_log", v.bound_source == BoundSource::thm23 ? "solver" : "formula"}};
    return j;
}

Json to_json(const QuadratureResult& q) {
    Json j;
    j["algorithm"] = q.algorithm_label();
    j["value"] = number(q.value);
    j["evaluations_used"] = q.evaluations_used;
    j["error_bound"] = q.error_bound ? number(*q.error_bound) : Json(nullptr);
    j["provenance"] = {{"value", "formula"}, {"error_bound", "formula"}};
    return j;
}

Json to_json(const GammaConstant& g) {
    Json j;
    j["delta"] = number(g.delta);
    j["eta"] = number(g.eta);
    j["value"] = number(g.value);
    j["alpha_star"] = number(g.alpha_star);
    j["slope_at_zero"] = number(g.slope_at_zero);
    j["provenance"] = {{"value", "solver"}, {"alpha_star", "solver"}, {"slope_at_zero", "formula"}};
    return j;
}

Json to_json(const BoundReport& r) {
    Json j;
    j["theorem"] = r.theorem;
    j["direction"] = direction_name(r.direction);
    j["log_value"] = number(r.log_value);
    j["preconditions_met"] = r.preconditions_met;
    j["explanation"] = r.explanation;
    Json extras = Json::object();
    Json prov;
    prov["log_value"] = "formula";
    for (const auto& [k, v] : r.extras) {
        extras[k] = number(v);
        prov[k] = "formula";
    }
    j["extras"] = extras;
    j["provenance"] = prov;
    return j;
}

Json to_json(const Verdict& v) {
    Json j;
    j["verdict"] = to_string(v.kind);
    j["theorem"] = v.theorem;
    j["explanation"] = v.explanation;
    Json implied = Json::array();
    for (auto k : v.implied) implied.push_back(to_string(k));
    j["implied"] = implied;
    Json witness = Json::object();
    Json prov = Json::object();
    for (const auto& [k, x] : v.witness) {
        witness[k] = number(x);
        prov[k] = "formula";
    }
    j["witness_parameters"] = witness;
    Json samples = Json::array();
    for (const auto& s : v.samples) {
        samples.push_back({{"d", s.d},
                           {"eps", number(s.eps)},
                           {"log_bound", number(s.log_bound)},
                           {"direction", direction_name(s.direction)}});
    }
    j["log_bound_at"] = samples;
    if (!v.samples.empty()) prov["log_bound_at"] = "formula";
    j["provenance"] = prov;
    return j;
}

Json certificate_json(const std::string& variant, double delta, std::size_t d, const SmoothnessProfile& p,
                      std::size_t max_order) {
    Json j;
    j["variant"] = variant;
    j["delta"] = number(delta);
    j["d"] = d;
    j["profile"] = p.to_string();
    const std::size_t top = p.k() ? std::min(*p.k(), max_order) : max_order;
    Json bounds = Json::array();
    for (std::size_t order = 0; order <= top; ++order) {
        bounds.push_back({{"j", order}, {"log_bound", number(p.log_L(order, d))}});
    }
    j["log_bounds"] = bounds;
    j["provenance"] = {{"log_bounds", "formula"}};
    return j;
}

}  // namespace curse
