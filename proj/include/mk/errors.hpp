#pragma once

#include <stdexcept>
#include <string>

namespace mk {

/// Base for every error the toolkit raises on bad input. The CLI maps
/// these to exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Shapes of two operands do not agree (non-square cost, marginal length mismatch, ...).
class DimensionError : public InputError {
public:
    explicit DimensionError(const std::string& what) : InputError(what) {}
};

/// Argument outside the mathematical domain of the operation (p < 1, nonzero charge, ...).
class DomainError : public InputError {
public:
    explicit DomainError(const std::string& what) : InputError(what) {}
};

/// An enumeration would exceed a configured size cap. Exit code 3 in the CLI.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mk
