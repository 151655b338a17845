#pragma once

#include <stdexcept>
#include <string>

namespace beamucb {

// Bad arguments: dimension mismatch, out-of-domain scalars, malformed config.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Factorization failures that survive the full-refactorization fallback.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// No feasible arm / Slater condition cannot be met.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace beamucb
