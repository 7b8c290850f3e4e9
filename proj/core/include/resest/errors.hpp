#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace resest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input validation failures. The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyInput : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class TopologyError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RankDeficient : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Malformed text input; carries the 1-based line number of the offending row.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Runtime failures. The CLI maps these to exit code 2.
class TooLarge : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class NoFeasibleSupport : public Error {
public:
    using Error::Error;
};

class InfeasibleProblem : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace resest
