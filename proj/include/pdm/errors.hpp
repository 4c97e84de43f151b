#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

/// Argument outside the mathematical domain of an operation (rho <= 0, L <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested bound state does not exist (e.g. beyond the Morse well's last level).
class NoStateError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Physically inconsistent parameter set: wrong model/potential pairing,
/// violated solvability constraint, unknown config key.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Series evaluation requested where the truncation tail is too large.
class TruncationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Self-consistent solve found no admissible root.
class NoRootError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace pdm
