#pragma once

#include <stdexcept>
#include <string>

namespace sse {

// User-facing input problems: bad config files, malformed Hamiltonian files,
// invalid flag values.  The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Runtime numerical failures: fully degenerate overlap matrices, empty
// symmetry sectors, eigensolver breakdowns.  The CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sse
