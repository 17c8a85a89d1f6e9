#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace geomsub {

// Bad input or broken contract (CLI exit code 2).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Laurent division of a non affine-invariant mask leaves a remainder.
struct NonZeroRemainderError : ValidationError {
    using ValidationError::ValidationError;
};

struct LengthNotDivisibleError : ValidationError {
    using ValidationError::ValidationError;
};

struct MaskNotInterpolatoryError : ValidationError {
    using ValidationError::ValidationError;
};

// Numerical failure while operating on valid input (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The logarithm map was evaluated at or beyond the cut locus.
struct CutLocusError : NumericalError {
    explicit CutLocusError(const std::string& what, std::int64_t index = -1, int round = -1)
        : NumericalError(what), index(index), round(round) {}
    std::int64_t index;  // offending output index, -1 if not applicable
    int round;           // offending subdivision round, -1 if not applicable
};

struct NoConvergenceError : NumericalError {
    explicit NoConvergenceError(const std::string& what, std::int64_t index = -1, int round = -1)
        : NumericalError(what), index(index), round(round) {}
    std::int64_t index;
    int round;
};

}  // namespace geomsub
