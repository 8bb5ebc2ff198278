#pragma once

#include <stdexcept>
#include <string>

namespace deepofw {

// Dimension or length mismatch between operands.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated an API precondition (e.g. backward on a non-scalar loss).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numeric argument is outside its mathematical domain (e.g. noise_var <= 0).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Input is degenerate for the requested statistic (e.g. all-zero block PAPR).
struct DegenerateInputError : std::runtime_error {
    explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent configuration; message names the offending fields.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite value reached a place that must stay finite (optimizer abort).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// The finite-difference oracle cannot certify anything (non-deterministic loss).
struct OracleInvalidError : std::runtime_error {
    explicit OracleInvalidError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace deepofw
