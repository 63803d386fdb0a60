#pragma once

#include <stdexcept>
#include <string>

namespace esw {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad dimensions, bad schema, bad parameters).
struct InputError : Error {
    using Error::Error;
};

/// The requested estimator is not defined on the given design
/// (singular normal equations at lambda = 0).
struct EstimatorUndefinedError : Error {
    using Error::Error;
};

/// An argument fell outside its admissible domain (e.g. effort outside the curve interval).
struct DomainError : Error {
    using Error::Error;
};

/// The problem instance has no feasible solution (e.g. budget below the minimum).
struct InfeasibleError : Error {
    using Error::Error;
};

} // namespace esw
