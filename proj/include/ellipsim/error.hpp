#pragma once

#include <stdexcept>
#include <string>

namespace ellipsim {

/// Raised when a time step produces non-finite state or violates a stability bound.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input; field() names the offending setting (e.g. "initial.support").
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& msg)
        : std::invalid_argument(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

} // namespace ellipsim
