#pragma once

#include <stdexcept>
#include <string>

namespace radialkit {

/// A point or parameter falls outside the domain of a distortion map.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed text input: model descriptors, recipes, CSV files, model files.
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Structurally valid input that violates an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    enum class Kind { unsupported_format, corrupt_file, io_failure };

    IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace radialkit
