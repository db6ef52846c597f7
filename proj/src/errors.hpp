#pragma once

#include <stdexcept>
#include <string>

namespace gnssheight {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or option values (bad filter bounds, bad spec fields).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input documents (CSV schema violations, bad JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Geometric preconditions violated (origin inside footprint, degenerate look angles).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Data that cannot support the requested fit (single-class labels, too few tuples).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Non-finite objective or other numerical breakdown, with diagnostics in the message.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace gnssheight
