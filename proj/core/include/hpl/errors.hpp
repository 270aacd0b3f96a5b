#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hpl {

// Base for every error raised by the library. The CLI maps subclasses to exit
// codes: ConfigError -> 2, NumericalError and its children -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    ConfigError(std::vector<std::string> keys, const std::string& what)
        : Error(what), keys_(std::move(keys)) {}

    /// Every offending key, in the order they were found.
    const std::vector<std::string>& keys() const noexcept { return keys_; }

private:
    std::vector<std::string> keys_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (loss > 1, ...).
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Hermite/Laguerre order above the supported recurrence cap.
class UnsupportedOrderError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidGridError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two objects that must share a time grid do not.
class GridMismatchError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A finite window cuts off more of a function than tolerated.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Impulse response wraps around the FFT window.
class AliasingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Non-finite or otherwise unusable input samples.
class DataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace hpl
