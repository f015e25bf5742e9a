// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Invalid argument values (negative scale, efficiency outside [0,1], ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A precondition of an operation was violated (interval misclassified,
/// coincident subinterval times, asymmetric model where symmetry is required).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

/// Numerical failure at runtime: quadrature did not reach the requested
/// tolerance, a determinant lost positivity, a bracket was not found.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg), achieved_tolerance(0) {}
    NumericError(const std::string& msg, double achieved)
        : std::runtime_error(msg), achieved_tolerance(achieved) {}

    /// Error estimate actually reached when the failure was raised (0 if n/a).
    double achieved_tolerance;
};

} // namespace biphoton
