#pragma once

#include <stdexcept>
#include <string>

namespace elmfs {

// Argument validation failures are reported as std::invalid_argument.
// The types below cover the domain-specific failure modes.

class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DegenerateMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace elmfs
