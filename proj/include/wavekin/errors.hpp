#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavekin {

// Root of every error raised by the library. Callers that only need to
// distinguish "our failure" from everything else catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (position off the field's
// support, negative density, time out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Structurally invalid field or scenario description.
class InvalidSpecError : public Error {
public:
    using Error::Error;
};

// Integrator step does not resolve the relaxation time.
class StepSizeError : public Error {
public:
    using Error::Error;
};

// Operation invoked on input that violates its documented assumptions.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A thinning candidate evaluated above the declared rate supremum.
class BoundExceededError : public Error {
public:
    BoundExceededError(const std::string& what, double rate, double bound)
        : Error(what), rate_(rate), bound_(bound) {}
    double rate() const noexcept { return rate_; }
    double bound() const noexcept { return bound_; }

private:
    double rate_;
    double bound_;
};

// Events that cannot be attributed to any histogram bin.
class AccountingError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line = 0, std::string field = {})
        : Error(what), line_(line), field_(std::move(field)) {}
    // 1-based line of the offending entry, 0 when unknown.
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

// Malformed run-directory file.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace wavekin
