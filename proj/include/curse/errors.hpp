// Copyright curse-lab contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace curse {

// Argument outside the mathematical domain of an operation (p < 1, d < 1, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Iterative solver hit its cap; usually a sign of numerical degeneracy.
class IterationLimitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Operation not available for the requested domain kind.
class UnsupportedDomain : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// No theorem's hypotheses match the requested classification.
class UnsupportedCombination : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// A finite-difference stencil node falls outside the integration domain.
class StencilOutsideDomain : public std::out_of_range {
  public:
    StencilOutsideDomain(std::size_t coordinate, const std::string& what)
        : std::out_of_range(what), coordinate_(coordinate) {}

    std::size_t coordinate() const noexcept { return coordinate_; }

  private:
    std::size_t coordinate_;
};

}  // namespace curse
