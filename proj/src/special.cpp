// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#include "curse/special.hpp"

#include <array>
#include <cmath>

#include "curse/errors.hpp"

namespace curse {

double zeta_tail(double s, long long first) {
    if (!(s > 1.0)) throw DomainError("zeta_tail: s must exceed 1");
    if (first < 1) throw DomainError("zeta_tail: first index must be >= 1");

    // B_{2k} / (2k)!
    static constexpr std::array<double, 8> bernoulli_over_factorial = {
        1.0 / 12.0,           -1.0 / 720.0,          1.0 / 30240.0,
        -1.0 / 1209600.0,     1.0 / 47900160.0,      -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,  -3617.0 / 10670622842880000.0,
    };

    constexpr long long direct_terms = 32;
    const long long cutoff = first + direct_terms;
    double head = 0.0;
    for (long long j = cutoff - 1; j >= first; --j) head += std::pow(static_cast<double>(j), -s);

    const double n = static_cast<double>(cutoff);
    double tail = std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s);
    // Rising factorial s (s+1) ... (s+2k-2) times n^{-s-2k+1}.
    double rising = s;
    double power = std::pow(n, -s - 1.0);
    for (std::size_t k = 0; k < bernoulli_over_factorial.size(); ++k) {
        tail += bernoulli_over_factorial[k] * rising * power;
        rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
        power /= n * n;
    }
    return head + tail;
}

double riemann_zeta(double s) { return zeta_tail(s, 1); }

double log_factorial(double j) { return std::lgamma(j + 1.0); }

}  // namespace curse
