#pragma once

#include <stdexcept>
#include <string>

namespace multiblow {

/// Root-finder or integrator failed to converge. Carries the offending
/// inputs in the message so failures are reproducible from the log alone.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// An argument lies outside the operation's admissible domain
/// (time past the blowup guard, support touching the weight singularity, ...).
class DomainError : public std::invalid_argument {
public:
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

/// Scenario files, overrides, or CLI usage are malformed or inconsistent.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace multiblow
