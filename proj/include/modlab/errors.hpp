#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modlab {

// Invalid generator or solver parameter. The message names the offending field.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Grid/geometry mismatch: a grid that does not cover a set, a ball leaving the grid, ...
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A mathematical precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Iterative solver failure or degenerate regression.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace modlab
