#pragma once

#include <stdexcept>
#include <string>

namespace normbench {

// Bad user input: malformed config, context mismatch, non-unit inversion.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid run configuration (non-prime p, empty window, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested computation exceeds an enumeration/precision budget.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// An internal cross-check failed; indicates a bug, never expected on valid input.
class CheckError : public std::runtime_error {
public:
    explicit CheckError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace normbench
