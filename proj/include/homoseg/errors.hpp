#pragma once

#include <stdexcept>
#include <string>

namespace homoseg {

/// Base for every error raised by the library. The CLI maps subclasses
/// onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions disagree (pred vs. mask, channels vs. model).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A configuration value lies outside its admissible range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The caller violated an operation's precondition (empty dataset,
/// step outside the schedule, stale forward cache, ...).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Filesystem or file-format failure. The message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// A nonfinite loss or gradient stopped training.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace homoseg
