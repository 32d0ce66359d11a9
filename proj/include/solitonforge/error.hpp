#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace solitonforge {

/// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value left the domain of a partial function (ln of a non-positive
/// number, division by zero, a point outside a group chart...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed expression text; offset is a 0-based byte position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Bad user input: schema violations, inconsistent dimensions, invalid options.
class InputError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Numerical procedure failed to produce a result (singular matrix,
/// Newton divergence, flow leaving the chart).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace solitonforge
