#pragma once

#include <stdexcept>
#include <string>

namespace ergocert {

/// Bad user input: malformed config, invalid parameters, out-of-domain points.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A continuous point was handed to a countable kernel, or similar.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A property that must hold by construction was violated (monotone iteration,
/// nondecreasing truncation rungs, ...). Signals a numerical or logic bug.
class InternalConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace ergocert
