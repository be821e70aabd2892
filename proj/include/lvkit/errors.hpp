#pragma once

#include <stdexcept>
#include <string>

namespace lvkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A point left the simplex by more than float noise. Signals a broken
/// operator (or bad input), not an accumulation artifact.
struct DriftExceeded : Error {
    using Error::Error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotSkewSymmetric : Error {
    using Error::Error;
};

struct EntryOutOfRange : Error {
    using Error::Error;
};

struct LambdaOutOfRange : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace lvkit
