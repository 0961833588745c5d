#pragma once

#include <stdexcept>
#include <string>

namespace latvp {

// Bad user input: malformed config files, out-of-range parameters, invalid
// lattice descriptions. The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: ill-conditioned channels, rank-deficient bases,
// enumeration blow-up. The CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace latvp
