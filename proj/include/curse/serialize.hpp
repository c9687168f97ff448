// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>

#include "curse/bounds.hpp"
#include "curse/fooling.hpp"
#include "curse/quadrature.hpp"
#include "curse/volume.hpp"

namespace curse {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "curse-lab/1";

// Finite doubles as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
Json number(double v);

// Each object below carries a "provenance" map from numeric field to one of
// formula, monte_carlo, solver.
Json to_json(const VolumeEstimate& v);
Json to_json(const QuadratureResult& q);
Json to_json(const GammaConstant& g);
Json to_json(const BoundReport& r);
Json to_json(const Verdict& v);
// Per-order log-bounds of a profile evaluated at dimension d.
Json certificate_json(const std::string& variant, double delta, std::size_t d, const SmoothnessProfile& p,
                      std::size_t max_order = 8);

}  // namespace curse
