#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pla {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in formula text, with a 1-based line/column.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Unbound variable, unknown symbol, arity mismatch or out-of-range value during evaluation.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Extrapolation of a limit value did not settle within the configured horizon.
class NotStabilized : public Error {
public:
    using Error::Error;
};

}  // namespace pla
