#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace relaysim {

/// Precondition violation on a numeric input (non-positive distance, t out of range, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A relay link with zero gain cannot carry either hop.
class InfeasibleLinkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too few usable points for a least-squares slope.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    enum class Kind { missing_file, parse_failure, unknown_key, invalid_value };

    ConfigError(Kind kind, std::string key, const std::string& message)
        : std::runtime_error(message), kind_(kind), key_(std::move(key))
    {
    }

    Kind kind() const noexcept { return kind_; }

    /// Dotted path of the offending key, empty when the error is not tied to one.
    const std::string& key() const noexcept { return key_; }

private:
    Kind kind_;
    std::string key_;
};

}  // namespace relaysim
