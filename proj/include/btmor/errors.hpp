// SPDX-License-Identifier: Apache-2.0

#ifndef BTMOR_ERRORS_HPP
#define BTMOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace btmor {

// Invalid input or configuration: netlist syntax, bad sizes, out-of-range
// settings. Maps to exit code 2 in the CLI.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: singular operator, unstable system, rank deficiency,
// unsolvable Lyapunov equation. Maps to exit code 3 in the CLI.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace btmor

#endif  // BTMOR_ERRORS_HPP
