#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weingarten {

/// Argument outside the domain of an operation (k out of range, t outside I, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Principal curvature vector outside the admissible cone.
class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate hypersurface geometry (induced metric not positive definite).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite arithmetic, failed quadrature, division by a vanishing quantity.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value; `key()` is the dotted key path when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, std::string key = {})
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Expression syntax or name-resolution error at a character offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)),
          message_(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string message_;
    std::size_t position_;
};

/// A sampled structural condition failed; names the condition and the point.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string condition, double t, const std::string& what)
        : std::runtime_error(condition + " fails at t=" + std::to_string(t) + ": " + what),
          condition_(std::move(condition)), t_(t) {}
    const std::string& condition() const noexcept { return condition_; }
    double t() const noexcept { return t_; }

private:
    std::string condition_;
    double t_;
};

/// Newton or continuation failure.
class SolverError : public std::runtime_error {
public:
    enum class Kind { divergence, singular, iteration_cap, continuation };

    SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace weingarten
