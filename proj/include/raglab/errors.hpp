#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace raglab {

/// Base class for all raglab errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record; carries the 1-based line number when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_ = 0;
};

/// Data violates a structural invariant (duplicate ids, inconsistent artifacts).
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// A record failed schema/taxonomy validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// An id could not be resolved.
class LookupError : public Error {
public:
    using Error::Error;
};

/// An argument is outside an operation's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A pluggable service (embedding, generation, scoring) failed.
class ServiceError : public Error {
public:
    using Error::Error;
};

/// A service call exceeded its deadline.
class TimeoutError : public ServiceError {
public:
    TimeoutError(const std::string& msg, double elapsed_seconds)
        : ServiceError(msg + " (elapsed " + std::to_string(elapsed_seconds) + "s)"),
          elapsed_seconds_(elapsed_seconds) {}

    double elapsed_seconds() const { return elapsed_seconds_; }

private:
    double elapsed_seconds_ = 0.0;
};

/// Inputs do not cover all required question ids.
class CompletenessError : public Error {
public:
    CompletenessError(const std::string& msg, std::vector<std::string> missing_ids)
        : Error(msg), missing_ids_(std::move(missing_ids)) {}

    const std::vector<std::string>& missing_ids() const { return missing_ids_; }

private:
    std::vector<std::string> missing_ids_;
};

/// Bad configuration or startup state (missing files, unknown bindings).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace raglab
