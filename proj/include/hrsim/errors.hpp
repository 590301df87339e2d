#pragma once

#include <stdexcept>
#include <string>

namespace hrsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside a stored horizon or window.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Field shapes that do not conform to the grid or to each other.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Linear-solve failure or non-finite values during time stepping.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double t)
        : Error(what + " (t = " + std::to_string(t) + ")"), detail_(what), time_(t) {}

    double time() const noexcept { return time_; }
    /// Message without the time suffix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    double time_;
};

/// Malformed or out-of-range run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace hrsim
