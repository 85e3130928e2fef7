#pragma once

#include <stdexcept>
#include <string>

namespace pbh {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Expression text does not conform to the grammar.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t column)
        : Error(message + " (at column " + std::to_string(column) + ")"), column_(column) {}

    /// 1-based column of the offending character.
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// A function was evaluated outside its domain (sqrt of a negative, log of zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A formula with a negative power of |dphi| or |H| was evaluated where that norm vanishes,
/// or a sample point falls into a declared excluded region.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// A metric failed to be positive definite or an immersion lost rank.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Inconsistent inputs: dimension mismatch, insufficient jet order, unmet precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed scenario file. `field()` names the offending JSON path.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace pbh
