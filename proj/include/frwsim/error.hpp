#pragma once

#include <stdexcept>
#include <string>

namespace frwsim {

/// Non-finite input, non-positive scale factor, empty trajectory and similar.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The initial data admit no real solution of the Hamiltonian constraint.
class NoRealBranch : public DomainError {
public:
    using DomainError::DomainError;
};

/// Fixing u0 forces a negative matter density through the constraint.
class NegativeDensity : public DomainError {
public:
    using DomainError::DomainError;
};

class StepSizeUnderflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace frwsim
