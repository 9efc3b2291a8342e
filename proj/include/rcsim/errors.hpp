#pragma once

#include <stdexcept>
#include <string>

namespace rcsim {

// Base class for all library errors. The CLI maps ConfigError to exit code 2
// and everything else to exit code 3.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration: bad sizes, unsupported modulation order, etc.
struct ConfigError : SimError {
    using SimError::SimError;
};

// Mismatched dimensions or lengths between operands.
struct DimensionError : SimError {
    using SimError::SimError;
};

// Invalid data: non-finite entries, empty inputs, degenerate pilot sets.
struct InputError : SimError {
    using SimError::SimError;
};

// An object was used before being put in the required state (e.g. an
// untrained readout).
struct StateError : SimError {
    using SimError::SimError;
};

}  // namespace rcsim
