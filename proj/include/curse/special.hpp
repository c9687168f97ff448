// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace curse {

// Tail sum of the zeta series, sum_{j >= first} j^{-s}, for s > 1 and first >= 1.
// Direct summation up to a cutoff, then Euler-Maclaurin with Bernoulli
// corrections; relative accuracy about 1e-14.
double zeta_tail(double s, long long first);

// Riemann zeta function for real s > 1.
double riemann_zeta(double s);

// ln(j!) for j >= 0.
double log_factorial(double j);

}  // namespace curse
