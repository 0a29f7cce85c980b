#pragma once

#include <stdexcept>

namespace lrbs {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatches, out-of-range parameters,
/// degenerate supervision.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File system or parse failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown, e.g. step-size underflow in the line search.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace lrbs
