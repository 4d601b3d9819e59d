#pragma once

#include <stdexcept>
#include <string>

namespace fanneal {

/// Base of every error raised by the library. `category()` is the short,
/// machine-parsable tag the CLI prints on failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* category() const noexcept { return "error"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* category() const noexcept override { return "invalid_argument"; }
};

/// Scenario validation failure; `field()` is the dotted path of the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error(field + ": " + reason), field_(std::move(field)) {}
    [[nodiscard]] const char* category() const noexcept override { return "config"; }
    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A state coordinate became non-finite during integration.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t step, long replicate, const std::string& what)
        : Error(what), step_(step), replicate_(replicate) {}
    [[nodiscard]] const char* category() const noexcept override { return "divergence"; }
    [[nodiscard]] std::size_t step() const noexcept { return step_; }
    /// -1 when the failing path was not part of an ensemble.
    [[nodiscard]] long replicate() const noexcept { return replicate_; }

private:
    std::size_t step_;
    long replicate_;
};

class CouplingError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* category() const noexcept override { return "coupling"; }
};

class IoError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* category() const noexcept override { return "io"; }
};

}  // namespace fanneal
