#pragma once

#include <stdexcept>
#include <string>

namespace bangbang {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate extent or too few cells per axis.
struct InvalidGridError : Error {
    using Error::Error;
};

/// Two grid functions that must live on the same grid do not.
struct IncompatibleGridsError : Error {
    using Error::Error;
};

/// Violated model precondition (bounds ordering, sign constraints, ...).
struct InvalidModelError : Error {
    using Error::Error;
};

/// Regression asked for with too few usable data points.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// All level-set measures vanished; the field is bounded away from zero.
struct DegenerateFitError : Error {
    using Error::Error;
};

/// Every scale of a perturbation sweep failed to converge.
struct SweepFailureError : Error {
    using Error::Error;
};

/// A locality precondition (distance to the reference control) was violated.
struct OutOfNeighborhoodError : Error {
    using Error::Error;
};

/// Malformed configuration file; message carries line information.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace bangbang
