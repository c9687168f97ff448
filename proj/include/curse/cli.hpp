// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace curse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitViolated = 2;
inline constexpr int kExitNumerical = 3;

/*!
 * Runs one subcommand. args excludes the program name, e.g.
 * {"constants", "--p-star"}. The primary artifact goes to --output when given
 * and to out otherwise; diagnostics go to err.
 *
 * "--config FILE" reads flat key=value lines; a key becomes "--key=value"
 * unless the same flag is already on the command line.
 */
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace curse::cli
