#pragma once

#include <stdexcept>
#include <string>

namespace unmix {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File-system problems: missing file, unreadable path.
struct IoError : Error {
    using Error::Error;
};

// Malformed input content: bad CSV rows, schema_version mismatch,
// duplicate rating pairs, out-of-scale ratings, dataset mismatch.
struct SchemaError : Error {
    using Error::Error;
};

// Numerical failures: divergence, singular systems, degenerate geometry.
struct NumericalError : Error {
    using Error::Error;
};

// Singular normal equations (typically lambda == 0 on an underdetermined
// class). The message advises a positive ridge penalty.
struct SingularSystemError : NumericalError {
    using NumericalError::NumericalError;
};

// Fewer data points than an algorithm needs (e.g. m < K(n,d) for GPCA).
struct InsufficientDataError : Error {
    using Error::Error;
};

// Account on which every identification attempt collapses (all restarts
// hit empty classes, or the geometry is degenerate).
struct DegenerateAccountError : Error {
    using Error::Error;
};

// Internal signal: a class in an assignment has no members. Callers that
// own a random restart loop catch this and re-seed.
struct EmptyClassError : Error {
    using Error::Error;
};

}  // namespace unmix
