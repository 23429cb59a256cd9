#pragma once

#include <stdexcept>
#include <string>

namespace tada {

/// Base of every exception raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A field failed its domain invariant (range, format, emptiness).
class InvalidValue : public Error {
public:
    InvalidValue(std::string field, const std::string& reason)
        : Error(field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace tada
