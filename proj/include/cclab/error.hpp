#pragma once

#include <stdexcept>
#include <string>

namespace cclab {

/// Bad input: malformed file, dimension mismatch, unsupported cone.
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The conic solver could not deliver a usable answer.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace cclab
