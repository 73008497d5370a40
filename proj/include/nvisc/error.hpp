#pragma once

#include <stdexcept>
#include <string>

namespace nvisc {

/// Base of every error raised by the library. The CLI maps the subclasses to
/// exit codes (config 2, numerical 3, empty inference 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, unknown keys, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (non-convergence, undefined ratio, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An inverse analysis produced no admissible parameter values.
class EmptyResultError : public Error {
public:
    using Error::Error;
};

}  // namespace nvisc
