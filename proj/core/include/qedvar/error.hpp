#pragma once

#include <stdexcept>
#include <string>

namespace qedvar {

/// Category of a failure, surfaced in the CLI's machine-readable error summary.
enum class ErrorKind {
    invalid_input,   // malformed or out-of-range model parameters
    config,          // scenario file parse/validation failure
    degenerate,      // ill-posed physics: degenerate ground state, exact resonance, ...
    convergence,     // an iterative solver ran out of iterations
    resource,        // requested problem size over budget
    io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Configuration error carrying the JSON path of the offending field.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error(ErrorKind::config, field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::config: return "config";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::resource: return "resource";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace qedvar
